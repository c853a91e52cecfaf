//! One end of a simulated connection.
//!
//! An endpoint owns both halves: a sender for the bytes it was asked to deliver
//! and a receiver for the peer's bytes. Data segments carry neither SYN nor ACK;
//! acknowledgements are separate pure ACKs, one per data segment received.

use std::collections::BTreeMap;

use crate::codepoint::{echo_signal_for, encode_tcp_eecn, CongestionLevel, EcnCodepoint, TcpEecn};
use crate::packet::{Direction, FlowId, NodeId, Packet, SegmentKind, TcpFlags};
use crate::time::{SimDuration, SimTime};

use super::echo::{EchoMode, EchoState};
use super::rtt::RttEstimator;
use super::window::{
    initial_cwnd, initial_segments, EchoResponse, HandshakeOutcome, RttView, WindowParams,
    WindowState,
};
use super::{Algorithm, CaDecay, TransportConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Initiator,
    Responder,
}

impl Role {
    /// Direction of segments this endpoint sends.
    pub fn outgoing(self) -> Direction {
        match self {
            Role::Initiator => Direction::Forward,
            Role::Responder => Direction::Reverse,
        }
    }
}

/// What the two ends agreed on during the handshake.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Negotiated {
    Eecn,
    Ecn,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Handshake,
    SlowStart,
    CongestionAvoidance,
    Recovery,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::Handshake => "handshake",
            Phase::SlowStart => "slow_start",
            Phase::CongestionAvoidance => "congestion_avoidance",
            Phase::Recovery => "recovery",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    TripleDupAck,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HsState {
    Closed,
    Listen,
    SynSent,
    SynReceived,
    Established,
}

/// Observable things an endpoint did while handling an input.
#[derive(Debug, Clone, PartialEq)]
pub enum ConnEvent {
    HandshakeComplete {
        outcome: HandshakeOutcome,
        initial_segments: u32,
    },
    RttSample(f64),
    /// A congestion echo changed (or was evaluated against) the window.
    Reaction {
        level: CongestionLevel,
        response: EchoResponse,
    },
    EcnReduction,
    Loss(LossKind),
    /// An in-order prefix advanced; `total` is bytes delivered so far.
    Delivered {
        total: u64,
    },
    /// A data segment carrying new bytes arrived.
    DataArrival {
        first_sent_at: SimTime,
        len: u32,
    },
    ProtocolViolation(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimerRequest {
    pub at: SimTime,
    pub generation: u64,
}

/// Everything produced by one call into an endpoint.
#[derive(Debug, Default)]
pub struct Outbox {
    pub packets: Vec<Packet>,
    pub events: Vec<ConnEvent>,
    pub timer: Option<TimerRequest>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EndpointStats {
    pub data_segments_sent: u64,
    pub retransmits: u64,
    pub timeouts: u64,
    pub fast_retransmits: u64,
    pub severe_reductions: u64,
    pub decay_reductions: u64,
    pub ecn_reductions: u64,
    pub cl1_echoes_sent: u64,
    pub cl2_echoes_sent: u64,
}

#[derive(Debug, Clone)]
pub struct EndpointConfig {
    pub flow: FlowId,
    pub role: Role,
    pub local: NodeId,
    pub peer: NodeId,
    pub algo: Algorithm,
    /// Application bytes this endpoint sends to its peer.
    pub send_bytes: u64,
    pub transport: TransportConfig,
}

#[derive(Debug, Clone)]
pub struct Endpoint {
    cfg: EndpointConfig,
    state: HsState,
    negotiated: Negotiated,
    outcome: Option<HandshakeOutcome>,
    /// Level carried by the peer's control packet, echoed in our reply.
    ctrl_level_to_echo: CongestionLevel,
    ctrl_sent_at: Option<SimTime>,
    ctrl_retransmitted: bool,

    params: WindowParams<f64>,
    window: WindowState<f64>,
    rtt: RttEstimator,
    snd_una: u64,
    snd_nxt: u64,
    high_sent: u64,
    dupacks: u32,
    in_recovery: bool,
    recover: Option<u64>,
    cwr_pending: bool,
    last_reaction: [Option<SimTime>; 2],
    last_ecn_reduction: Option<SimTime>,
    last_ca_decay: Option<SimTime>,
    first_sent: BTreeMap<u64, SimTime>,

    timer_deadline: Option<SimTime>,
    timer_generation: u64,

    echo: EchoState,
    rcv_nxt: u64,
    out_of_order: BTreeMap<u64, u64>,

    stats: EndpointStats,
}

impl Endpoint {
    pub fn new(cfg: EndpointConfig) -> Self {
        let t = &cfg.transport;
        let params = t.window_params();
        let seg = params.seg_size;
        let rtt = RttEstimator::new(t.avg_rtt, t.initial_rto_s, t.min_rto_s);
        let state = match cfg.role {
            Role::Initiator => HsState::Closed,
            Role::Responder => HsState::Listen,
        };
        Self {
            state,
            negotiated: Negotiated::None,
            outcome: None,
            ctrl_level_to_echo: CongestionLevel::None,
            ctrl_sent_at: None,
            ctrl_retransmitted: false,
            params,
            window: WindowState::new(seg),
            rtt,
            snd_una: 0,
            snd_nxt: 0,
            high_sent: 0,
            dupacks: 0,
            in_recovery: false,
            recover: None,
            cwr_pending: false,
            last_reaction: [None; 2],
            last_ecn_reduction: None,
            last_ca_decay: None,
            first_sent: BTreeMap::new(),
            timer_deadline: None,
            timer_generation: 0,
            echo: EchoState::new(EchoMode::Off),
            rcv_nxt: 0,
            out_of_order: BTreeMap::new(),
            stats: EndpointStats::default(),
            cfg,
        }
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.cfg
    }

    pub fn negotiated(&self) -> Negotiated {
        self.negotiated
    }

    pub fn outcome(&self) -> Option<HandshakeOutcome> {
        self.outcome
    }

    pub fn window(&self) -> WindowState<f64> {
        self.window
    }

    pub fn params(&self) -> &WindowParams<f64> {
        &self.params
    }

    pub fn rtt(&self) -> &RttEstimator {
        &self.rtt
    }

    pub fn stats(&self) -> EndpointStats {
        self.stats
    }

    pub fn echo(&self) -> &EchoState {
        &self.echo
    }

    pub fn is_established(&self) -> bool {
        self.state == HsState::Established
    }

    /// Bytes of the peer's stream delivered in order.
    pub fn delivered(&self) -> u64 {
        self.rcv_nxt
    }

    /// Bytes of our stream the peer has acknowledged.
    pub fn acked(&self) -> u64 {
        self.snd_una
    }

    pub fn send_complete(&self) -> bool {
        self.is_established() && self.snd_una >= self.cfg.send_bytes
    }

    pub fn phase(&self) -> Phase {
        if self.state != HsState::Established {
            Phase::Handshake
        } else if self.in_recovery {
            Phase::Recovery
        } else if self.window.in_slow_start() {
            Phase::SlowStart
        } else {
            Phase::CongestionAvoidance
        }
    }

    pub fn timer_generation(&self) -> u64 {
        self.timer_generation
    }

    fn algo_ip(&self) -> EcnCodepoint {
        match self.negotiated {
            Negotiated::Eecn => EcnCodepoint::ECT1,
            Negotiated::Ecn => EcnCodepoint::ECT0,
            Negotiated::None => EcnCodepoint::NOT_ECT,
        }
    }

    fn packet(&self, kind: SegmentKind, now: SimTime) -> Packet {
        Packet {
            id: 0,
            flow: self.cfg.flow,
            dir: self.cfg.role.outgoing(),
            src: self.cfg.local,
            dst: self.cfg.peer,
            kind,
            seq: 0,
            ack: 0,
            len: 0,
            flags: TcpFlags::default(),
            ip: EcnCodepoint::NOT_ECT,
            sent_at: now,
            first_sent_at: now,
            retransmit: false,
            ts_echo: None,
        }
    }

    fn arm_timer(&mut self, at: SimTime, out: &mut Outbox) {
        self.timer_generation += 1;
        self.timer_deadline = Some(at);
        out.timer = Some(TimerRequest {
            at,
            generation: self.timer_generation,
        });
    }

    fn cancel_timer(&mut self) {
        if self.timer_deadline.take().is_some() {
            self.timer_generation += 1;
        }
    }

    fn rto(&self) -> SimDuration {
        SimDuration::from_secs_f64(self.rtt.rto())
    }

    // ---- handshake ------------------------------------------------------

    /// Starts an active open. Only valid on a fresh initiator.
    pub fn open(&mut self, now: SimTime) -> Outbox {
        let mut out = Outbox::default();
        assert_eq!(self.state, HsState::Closed, "open on a used endpoint");
        self.state = HsState::SynSent;
        self.ctrl_sent_at = Some(now);
        let syn = self.syn(now, false);
        out.packets.push(syn);
        let at = now + self.rto();
        self.arm_timer(at, &mut out);
        out
    }

    fn syn(&self, now: SimTime, retransmit: bool) -> Packet {
        let mut p = self.packet(SegmentKind::Syn, now);
        p.flags.syn = true;
        p.retransmit = retransmit;
        match self.cfg.algo {
            Algorithm::Eecn => {
                p.flags.cwr = true;
                p.ip = EcnCodepoint::ECT1;
            }
            Algorithm::NewRenoEcn => {
                p.flags.ece = true;
                p.flags.cwr = true;
            }
            Algorithm::NewReno => {}
        }
        p
    }

    fn syn_ack(&self, now: SimTime, retransmit: bool) -> Packet {
        let mut p = self.packet(SegmentKind::SynAck, now);
        p.flags.syn = true;
        p.flags.ack = true;
        p.retransmit = retransmit;
        match self.negotiated {
            Negotiated::Eecn => {
                let (ece, cwr) = encode_tcp_eecn(echo_signal_for(self.ctrl_level_to_echo))
                    .expect("echo signals are encodable");
                p.flags.ece = ece;
                p.flags.cwr = cwr;
                p.ip = EcnCodepoint::ECT1;
            }
            Negotiated::Ecn => p.flags.ece = true,
            Negotiated::None => {}
        }
        p
    }

    fn handshake_ack(&self, now: SimTime) -> Packet {
        let mut p = self.packet(SegmentKind::Ack, now);
        p.flags.ack = true;
        if self.negotiated == Negotiated::Eecn {
            let (ece, cwr) = encode_tcp_eecn(echo_signal_for(self.ctrl_level_to_echo))
                .expect("echo signals are encodable");
            p.flags.ece = ece;
            p.flags.cwr = cwr;
        }
        p
    }

    fn establish(&mut self, outcome: HandshakeOutcome, now: SimTime, out: &mut Outbox) {
        self.state = HsState::Established;
        self.outcome = Some(outcome);
        self.window = WindowState::new(initial_cwnd(outcome, self.params.seg_size));
        self.echo = EchoState::new(match self.negotiated {
            Negotiated::Eecn => EchoMode::Eecn,
            Negotiated::Ecn => EchoMode::Ecn,
            Negotiated::None => EchoMode::Off,
        });
        self.cancel_timer();
        out.events.push(ConnEvent::HandshakeComplete {
            outcome,
            initial_segments: initial_segments(outcome),
        });
        self.try_send(now, out);
    }

    fn sample_ctrl_rtt(&mut self, now: SimTime, out: &mut Outbox) {
        if let (Some(sent), false) = (self.ctrl_sent_at, self.ctrl_retransmitted) {
            let s = (now - sent).as_secs_f64();
            if s > 0.0 {
                self.rtt.on_sample(s);
                out.events.push(ConnEvent::RttSample(s));
            }
        }
    }

    fn on_syn(&mut self, p: &Packet, now: SimTime, out: &mut Outbox) {
        match self.state {
            HsState::Listen => {
                let sig = p.flags.signal();
                self.negotiated = match self.cfg.algo {
                    Algorithm::Eecn if sig.decode().negotiates_eecn() => Negotiated::Eecn,
                    Algorithm::NewRenoEcn if p.flags.ece && p.flags.cwr => Negotiated::Ecn,
                    _ => Negotiated::None,
                };
                if self.negotiated == Negotiated::Eecn {
                    self.ctrl_level_to_echo = p.ip.level();
                }
                self.state = HsState::SynReceived;
                self.ctrl_sent_at = Some(now);
                out.packets.push(self.syn_ack(now, false));
                let at = now + self.rto();
                self.arm_timer(at, out);
            }
            HsState::SynReceived => {
                // duplicate SYN: the SYN-ACK was lost or is late
                if self.negotiated == Negotiated::Eecn {
                    self.ctrl_level_to_echo = self.ctrl_level_to_echo.max(p.ip.level());
                }
                self.ctrl_retransmitted = true;
                out.packets.push(self.syn_ack(now, true));
            }
            _ => {}
        }
    }

    fn on_syn_ack(&mut self, p: &Packet, now: SimTime, out: &mut Outbox) {
        match self.state {
            HsState::SynSent => {
                self.sample_ctrl_rtt(now, out);
                let outcome = match self.cfg.algo {
                    Algorithm::Eecn => {
                        let sig = p.flags.signal().decode();
                        match sig.echoed_level() {
                            Some(level) => {
                                self.negotiated = Negotiated::Eecn;
                                self.ctrl_level_to_echo = p.ip.level();
                                HandshakeOutcome::capable(level)
                            }
                            None => HandshakeOutcome::not_capable(),
                        }
                    }
                    Algorithm::NewRenoEcn => {
                        if p.flags.ece && !p.flags.cwr {
                            self.negotiated = Negotiated::Ecn;
                        }
                        HandshakeOutcome::not_capable()
                    }
                    Algorithm::NewReno => HandshakeOutcome::not_capable(),
                };
                out.packets.push(self.handshake_ack(now));
                self.establish(outcome, now, out);
            }
            HsState::Established => {
                // our final ACK was lost; repeat it
                out.packets.push(self.handshake_ack(now));
            }
            _ => {}
        }
    }

    // ---- entry points -----------------------------------------------------

    pub fn on_packet(&mut self, p: &Packet, now: SimTime) -> Outbox {
        let mut out = Outbox::default();
        match p.kind {
            SegmentKind::Syn => self.on_syn(p, now, &mut out),
            SegmentKind::SynAck => self.on_syn_ack(p, now, &mut out),
            SegmentKind::Ack => self.on_ack(p, now, &mut out),
            SegmentKind::Data => self.on_data(p, now, &mut out),
        }
        out
    }

    pub fn on_timer(&mut self, generation: u64, now: SimTime) -> Outbox {
        let mut out = Outbox::default();
        if generation != self.timer_generation || self.timer_deadline != Some(now) {
            return out;
        }
        self.timer_deadline = None;
        match self.state {
            HsState::SynSent => {
                self.ctrl_retransmitted = true;
                self.rtt.backoff();
                out.packets.push(self.syn(now, true));
                let at = now + self.rto();
                self.arm_timer(at, &mut out);
            }
            HsState::SynReceived => {
                self.ctrl_retransmitted = true;
                self.rtt.backoff();
                out.packets.push(self.syn_ack(now, true));
                let at = now + self.rto();
                self.arm_timer(at, &mut out);
            }
            HsState::Established if self.snd_una < self.snd_nxt => {
                self.on_loss(LossKind::Timeout, now, &mut out);
            }
            _ => {}
        }
        out
    }

    // ---- receiver ---------------------------------------------------------

    fn on_data(&mut self, p: &Packet, now: SimTime, out: &mut Outbox) {
        match self.state {
            HsState::Established => {}
            HsState::SynReceived => {
                // The handshake ACK was lost but the peer is already sending.
                let outcome = if self.negotiated == Negotiated::Eecn {
                    HandshakeOutcome::capable(CongestionLevel::None)
                } else {
                    HandshakeOutcome::not_capable()
                };
                self.establish(outcome, now, out);
            }
            _ => {
                out.events
                    .push(ConnEvent::ProtocolViolation("data before handshake"));
                return;
            }
        }
        let cwr = match self.negotiated {
            Negotiated::Eecn => p.flags.signal().decode() == TcpEecn::Cwr,
            Negotiated::Ecn => p.flags.cwr,
            Negotiated::None => false,
        };
        self.echo.on_data(p.ip, cwr);

        let before = self.rcv_nxt;
        let end = p.end_seq();
        if p.seq <= self.rcv_nxt && end > self.rcv_nxt {
            self.rcv_nxt = end;
            while let Some((&s, &e)) = self.out_of_order.first_key_value() {
                if s > self.rcv_nxt {
                    break;
                }
                self.out_of_order.pop_first();
                self.rcv_nxt = self.rcv_nxt.max(e);
            }
        } else if p.seq > self.rcv_nxt {
            let slot = self.out_of_order.entry(p.seq).or_insert(end);
            *slot = (*slot).max(end);
        }
        let new_bytes = self.rcv_nxt > before || (p.seq > before && !p.retransmit);
        if new_bytes {
            out.events.push(ConnEvent::DataArrival {
                first_sent_at: p.first_sent_at,
                len: p.len,
            });
        }
        if self.rcv_nxt > before {
            out.events.push(ConnEvent::Delivered {
                total: self.rcv_nxt,
            });
        }

        let sig = self.echo.next_ack();
        match sig.level {
            CongestionLevel::Cl1 => self.stats.cl1_echoes_sent += 1,
            CongestionLevel::Cl2 => self.stats.cl2_echoes_sent += 1,
            CongestionLevel::None => {}
        }
        let mut ack = self.packet(SegmentKind::Ack, now);
        ack.flags.ack = true;
        ack.flags.ece = sig.ece;
        ack.flags.cwr = sig.cwr;
        ack.ack = self.rcv_nxt;
        ack.ts_echo = Some((p.sent_at, p.retransmit));
        out.packets.push(ack);
    }

    // ---- sender -----------------------------------------------------------

    fn rtt_view(&self) -> Option<RttView<f64>> {
        self.rtt.cur().map(|cur| RttView {
            cur,
            avg: self.rtt.avg(),
        })
    }

    fn on_ack(&mut self, p: &Packet, now: SimTime, out: &mut Outbox) {
        match self.state {
            HsState::SynReceived => {
                self.sample_ctrl_rtt(now, out);
                let outcome = if self.negotiated == Negotiated::Eecn {
                    let level = p
                        .flags
                        .signal()
                        .decode()
                        .echoed_level()
                        .unwrap_or(CongestionLevel::None);
                    HandshakeOutcome::capable(level)
                } else {
                    HandshakeOutcome::not_capable()
                };
                self.establish(outcome, now, out);
                return;
            }
            HsState::Established => {}
            _ => {
                out.events
                    .push(ConnEvent::ProtocolViolation("ack before handshake"));
                return;
            }
        }
        if p.ack == 0 && self.cfg.send_bytes > 0 && self.snd_nxt == 0 {
            // duplicate handshake ACK before any data left
            return;
        }

        if let Some((sent, false)) = p.ts_echo {
            let s = (now - sent).as_secs_f64();
            if s > 0.0 {
                self.rtt.on_sample(s);
                out.events.push(ConnEvent::RttSample(s));
            }
        }

        let reacted = self.process_congestion_signal(p, now, out);

        if p.ack > self.snd_una {
            let newly = p.ack - self.snd_una;
            self.snd_una = p.ack;
            if self.snd_nxt < self.snd_una {
                self.snd_nxt = self.snd_una;
            }
            let keep = self.first_sent.split_off(&self.snd_una);
            self.first_sent = keep;
            self.dupacks = 0;
            if self.in_recovery {
                self.on_recovery_ack(newly, now, out);
            } else if !reacted {
                self.on_ack_window_growth(now);
            }
            if self.snd_una < self.snd_nxt {
                let at = now + self.rto();
                self.arm_timer(at, out);
            } else {
                self.cancel_timer();
            }
        } else if p.ack == self.snd_una && self.snd_una < self.snd_nxt {
            self.dupacks += 1;
            if self.in_recovery {
                self.window.cwnd += self.params.seg_size;
            } else if self.dupacks == 3 && self.recover.is_none_or(|r| self.snd_una > r) {
                self.on_loss(LossKind::TripleDupAck, now, out);
            }
        }
        self.try_send(now, out);
    }

    /// Returns true if the window was reduced.
    fn process_congestion_signal(&mut self, p: &Packet, now: SimTime, out: &mut Outbox) -> bool {
        match self.negotiated {
            Negotiated::Eecn => {
                let level = match p.flags.signal().decode() {
                    TcpEecn::Cl1Echo => CongestionLevel::Cl1,
                    TcpEecn::Cl2Echo => CongestionLevel::Cl2,
                    _ => return false,
                };
                self.on_congestion_echo(level, now, out)
            }
            Negotiated::Ecn if p.flags.ece => self.baseline_ecn_behavior(now, out),
            _ => false,
        }
    }

    fn reaction_slot(level: CongestionLevel) -> usize {
        match level {
            CongestionLevel::Cl2 => 1,
            _ => 0,
        }
    }

    fn within_reaction_window(&self, last: Option<SimTime>, now: SimTime) -> bool {
        last.is_some_and(|t| now.saturating_since(t).as_secs_f64() < self.rtt.avg())
    }

    /// Applies an echoed level. At most one reduction per level per average RTT.
    pub fn on_congestion_echo(
        &mut self,
        level: CongestionLevel,
        now: SimTime,
        out: &mut Outbox,
    ) -> bool {
        if self.state != HsState::Established || self.negotiated != Negotiated::Eecn {
            out.events.push(ConnEvent::ProtocolViolation(
                "congestion echo outside an EECN connection",
            ));
            return false;
        }
        if !level.is_congested() {
            return false;
        }
        let slot = Self::reaction_slot(level);
        if self.in_recovery || self.within_reaction_window(self.last_reaction[slot], now) {
            return false;
        }
        let rtt = self.rtt_view().unwrap_or(RttView { cur: 0.0, avg: 0.0 });
        let response = self.window.on_congestion_echo(level, rtt, &self.params);
        self.cwr_pending = true;
        out.events.push(ConnEvent::Reaction { level, response });
        match response {
            EchoResponse::Severe => self.stats.severe_reductions += 1,
            EchoResponse::Decay => self.stats.decay_reductions += 1,
            EchoResponse::Unchanged => return false,
        }
        self.last_reaction[slot] = Some(now);
        true
    }

    /// Classic ECN response: one halving per RTT, CWR on the next data segment.
    pub fn baseline_ecn_behavior(&mut self, now: SimTime, out: &mut Outbox) -> bool {
        if self.negotiated != Negotiated::Ecn {
            return false;
        }
        if self.in_recovery || self.within_reaction_window(self.last_ecn_reduction, now) {
            return false;
        }
        self.window.halve(&self.params);
        self.cwr_pending = true;
        self.last_ecn_reduction = Some(now);
        self.stats.ecn_reductions += 1;
        out.events.push(ConnEvent::EcnReduction);
        true
    }

    fn on_ack_window_growth(&mut self, now: SimTime) {
        if self.negotiated != Negotiated::Eecn {
            self.window.newreno_on_ack(&self.params);
            return;
        }
        let Some(rtt) = self.rtt_view() else {
            self.window.newreno_on_ack(&self.params);
            return;
        };
        let decays = !self.window.in_slow_start() && rtt.rising();
        let allow_decay = match self.cfg.transport.ca_decay {
            CaDecay::PerAck => true,
            CaDecay::PerRtt => !self.within_reaction_window(self.last_ca_decay, now),
        };
        self.window.eecn_on_ack(rtt, &self.params, allow_decay);
        if decays && allow_decay {
            self.last_ca_decay = Some(now);
        }
    }

    fn on_recovery_ack(&mut self, newly: u64, now: SimTime, out: &mut Outbox) {
        let recover = self.recover.expect("recovery point set on entry");
        if self.snd_una >= recover {
            self.in_recovery = false;
            self.window.cwnd = self.window.ssthresh.max(self.params.seg_size);
        } else {
            self.retransmit_head(now, out);
            let seg = self.params.seg_size;
            self.window.cwnd = (self.window.cwnd - newly as f64 + seg).max(seg);
        }
    }

    fn on_loss(&mut self, kind: LossKind, now: SimTime, out: &mut Outbox) {
        out.events.push(ConnEvent::Loss(kind));
        self.recover = Some(self.high_sent);
        match kind {
            LossKind::TripleDupAck => {
                self.stats.fast_retransmits += 1;
                self.window.on_triple_dupack(&self.params);
                self.in_recovery = true;
                self.retransmit_head(now, out);
            }
            LossKind::Timeout => {
                self.stats.timeouts += 1;
                self.window.on_timeout(&self.params);
                self.in_recovery = false;
                self.dupacks = 0;
                self.snd_nxt = self.snd_una;
                self.rtt.backoff();
                self.try_send(now, out);
                if self.snd_una < self.snd_nxt {
                    let at = now + self.rto();
                    self.arm_timer(at, out);
                }
            }
        }
    }

    fn data_segment(&mut self, seq: u64, now: SimTime) -> Packet {
        let remaining = self.cfg.send_bytes - seq;
        let len = remaining.min(u64::from(self.cfg.transport.seg_size)) as u32;
        let first = *self.first_sent.entry(seq).or_insert(now);
        let retransmit = seq < self.high_sent;
        let mut p = self.packet(SegmentKind::Data, now);
        p.seq = seq;
        p.len = len;
        p.ip = self.algo_ip();
        p.first_sent_at = first;
        p.retransmit = retransmit;
        if self.cwr_pending && self.negotiated != Negotiated::None {
            p.flags.cwr = true;
            self.cwr_pending = false;
        }
        self.stats.data_segments_sent += 1;
        if retransmit {
            self.stats.retransmits += 1;
        }
        p
    }

    fn retransmit_head(&mut self, now: SimTime, out: &mut Outbox) {
        if self.snd_una >= self.cfg.send_bytes {
            return;
        }
        let p = self.data_segment(self.snd_una, now);
        out.packets.push(p);
        let at = now + self.rto();
        self.arm_timer(at, out);
    }

    fn try_send(&mut self, now: SimTime, out: &mut Outbox) {
        if self.state != HsState::Established {
            return;
        }
        let mut sent_any = false;
        while self.snd_nxt < self.cfg.send_bytes {
            let len =
                (self.cfg.send_bytes - self.snd_nxt).min(u64::from(self.cfg.transport.seg_size));
            let flight = self.snd_nxt - self.snd_una;
            if flight > 0 && (flight + len) as f64 > self.window.cwnd {
                break;
            }
            let p = self.data_segment(self.snd_nxt, now);
            self.snd_nxt = p.end_seq();
            self.high_sent = self.high_sent.max(self.snd_nxt);
            out.packets.push(p);
            sent_any = true;
        }
        if sent_any && self.timer_deadline.is_none() {
            let at = now + self.rto();
            self.arm_timer(at, out);
        }
    }
}
