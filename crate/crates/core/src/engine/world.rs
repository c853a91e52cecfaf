use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codepoint::CongestionLevel;
use crate::error::ConfigError;
use crate::metrics::{
    self, Conservation, FlowRecord, QueueRecord, RunData, SimReport, TraceLog, TraceRecord,
    SERIES_BUCKET_S,
};
use crate::packet::{Direction, FlowId, NodeId, Packet, SegmentKind, HEADER_BYTES};
use crate::queue::{EnqueueOutcome, MarkingMode, RouterQueue};
use crate::time::{SimDuration, SimTime};
use crate::transport::{
    ConnEvent, Endpoint, EndpointConfig, LossKind, Outbox, Role, TransportConfig,
};

use super::calendar::Calendar;
use super::config::{FlowSpec, Opener, ScenarioConfig, TopologyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Sender,
    Router,
    Receiver,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

enum Egress {
    Router { queue: RouterQueue, record: usize },
    Host(VecDeque<Packet>),
}

/// One direction of a point-to-point link with the sender's egress buffer.
pub struct Channel {
    pub from: usize,
    pub to: usize,
    pub rate_bps: f64,
    pub delay: SimDuration,
    pub name: String,
    egress: Egress,
    busy: Option<Packet>,
}

impl Channel {
    fn resident(&self) -> impl Iterator<Item = &Packet> {
        let buffered: Box<dyn Iterator<Item = &Packet>> = match &self.egress {
            Egress::Router { queue, .. } => Box::new(queue.iter()),
            Egress::Host(q) => Box::new(q.iter()),
        };
        buffered.chain(self.busy.iter())
    }

    pub fn router_queue(&self) -> Option<&RouterQueue> {
        match &self.egress {
            Egress::Router { queue, .. } => Some(queue),
            Egress::Host(_) => None,
        }
    }
}

#[derive(Debug)]
enum Action {
    FlowStart(usize),
    PacketArrival {
        node: usize,
        packet: Packet,
    },
    TransmitComplete(usize),
    TimerExpiry {
        flow: usize,
        role: Role,
        generation: u64,
    },
}

struct FlowRuntime {
    spec: FlowSpec,
    initiator: Endpoint,
    responder: Endpoint,
    initiator_node: usize,
    responder_node: usize,
    sender_role: Role,
    completed: bool,
}

impl FlowRuntime {
    fn endpoint(&mut self, role: Role) -> &mut Endpoint {
        match role {
            Role::Initiator => &mut self.initiator,
            Role::Responder => &mut self.responder,
        }
    }

    fn node(&self, role: Role) -> usize {
        match role {
            Role::Initiator => self.initiator_node,
            Role::Responder => self.responder_node,
        }
    }

    fn receiver_role(&self) -> Role {
        match self.sender_role {
            Role::Initiator => Role::Responder,
            Role::Responder => Role::Initiator,
        }
    }

    fn sender(&self) -> &Endpoint {
        match self.sender_role {
            Role::Initiator => &self.initiator,
            Role::Responder => &self.responder,
        }
    }

    fn receiver(&self) -> &Endpoint {
        match self.sender_role {
            Role::Initiator => &self.responder,
            Role::Responder => &self.initiator,
        }
    }

    fn done(&self) -> bool {
        let both = self.initiator.is_established() && self.responder.is_established();
        both && self.receiver().delivered() >= self.spec.size_bytes
            && self.sender().delivered() >= self.spec.reverse_bytes
    }
}

/// Options that do not change simulation results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub trace: bool,
}

pub struct SimOutput {
    pub report: SimReport,
    pub trace: Option<TraceLog>,
}

/// A built network with its flows, ready to run.
pub struct SimWorld {
    name: String,
    seed: u64,
    algo_label: String,
    nodes: Vec<Node>,
    channels: Vec<Channel>,
    /// `route[node][dst]` is the channel leaving `node` toward `dst`.
    route: Vec<Vec<Option<usize>>>,
    flows: Vec<FlowRuntime>,
    calendar: Calendar<Action>,
    rng: ChaCha8Rng,
    next_packet_id: u64,
    conservation: Conservation,
    flow_records: Vec<FlowRecord>,
    queue_records: Vec<QueueRecord>,
    trace: Option<TraceLog>,
}

fn typical_service_time(rate_bps: f64) -> SimDuration {
    SimDuration::serialization(1000 + HEADER_BYTES, rate_bps)
}

impl SimWorld {
    fn empty(cfg: &ScenarioConfig, seed: u64) -> Self {
        Self {
            name: cfg.name.clone(),
            seed,
            algo_label: cfg.algorithm_label(),
            nodes: Vec::new(),
            channels: Vec::new(),
            route: Vec::new(),
            flows: Vec::new(),
            calendar: Calendar::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_packet_id: 0,
            conservation: Conservation::default(),
            flow_records: Vec::new(),
            queue_records: Vec::new(),
            trace: None,
        }
    }

    /// Builds the router line described by `cfg` and spawns its flows.
    pub(crate) fn build_line(cfg: &ScenarioConfig, seed: u64) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let t = &cfg.topology;
        let mut w = Self::empty(cfg, seed);
        let add = |w: &mut Self, name: &str, kind| {
            w.nodes.push(Node {
                name: name.to_owned(),
                kind,
            });
            w.nodes.len() - 1
        };
        let senders: Vec<usize> = t
            .senders
            .iter()
            .map(|n| add(&mut w, n, NodeKind::Sender))
            .collect();
        let routers: Vec<usize> = t
            .routers
            .iter()
            .map(|r| add(&mut w, &r.name, NodeKind::Router))
            .collect();
        let receivers: Vec<usize> = t
            .receivers
            .iter()
            .map(|n| add(&mut w, n, NodeKind::Receiver))
            .collect();

        let first = routers[0];
        let last = *routers.last().expect("at least two routers");
        for &s in &senders {
            w.link(cfg, s, first, t.edge.rate_bps, t.edge.delay_s)?;
        }
        for (i, l) in t.core.iter().enumerate() {
            w.link(cfg, routers[i], routers[i + 1], l.rate_bps, l.delay_s)?;
        }
        for &r in &receivers {
            w.link(cfg, last, r, t.edge.rate_bps, t.edge.delay_s)?;
        }
        w.compute_routes();
        w.spawn_flows(cfg)?;
        Ok(w)
    }

    fn link(
        &mut self,
        cfg: &ScenarioConfig,
        a: usize,
        b: usize,
        rate_bps: f64,
        delay_s: f64,
    ) -> Result<(), ConfigError> {
        for (from, to) in [(a, b), (b, a)] {
            let name = format!("{}>{}", self.nodes[from].name, self.nodes[to].name);
            let egress = if self.nodes[from].kind == NodeKind::Router {
                let idx = cfg
                    .topology
                    .routers
                    .iter()
                    .position(|r| r.name == self.nodes[from].name)
                    .expect("router node has a spec");
                let spec = &cfg.topology.routers[idx];
                let mode = cfg.marking_mode(spec);
                let qcfg = spec.queue_config(mode);
                let queue = RouterQueue::new(&qcfg, typical_service_time(rate_bps))
                    .map_err(|e| ConfigError::new(format!("topology.routers[{idx}]"), e.message))?;
                let record = self.queue_records.len();
                self.queue_records.push(QueueRecord {
                    id: record as u32,
                    name: name.clone(),
                    mode,
                    arrivals: 0,
                    dequeued: 0,
                    drops: 0,
                    drop_bytes: 0,
                    marks_cl1: 0,
                    marks_cl2: 0,
                    mark_bytes: 0,
                    resident: 0,
                    sojourn: Vec::new(),
                    occupancy: metrics::BucketSeries::new(SERIES_BUCKET_S),
                });
                Egress::Router { queue, record }
            } else {
                Egress::Host(VecDeque::new())
            };
            self.channels.push(Channel {
                from,
                to,
                rate_bps,
                delay: SimDuration::from_secs_f64(delay_s),
                name,
                egress,
                busy: None,
            });
        }
        Ok(())
    }

    fn compute_routes(&mut self) {
        let n = self.nodes.len();
        self.route = vec![vec![None; n]; n];
        for dst in 0..n {
            // breadth-first search backwards from dst over reversed channels
            let mut seen = vec![false; n];
            seen[dst] = true;
            let mut frontier = VecDeque::from([dst]);
            while let Some(v) = frontier.pop_front() {
                for (ci, ch) in self.channels.iter().enumerate() {
                    if ch.to == v && !seen[ch.from] {
                        seen[ch.from] = true;
                        self.route[ch.from][dst] = Some(ci);
                        frontier.push_back(ch.from);
                    }
                }
            }
        }
    }

    fn node_index(&self, name: &str) -> usize {
        self.nodes
            .iter()
            .position(|n| n.name == name)
            .expect("validated node name")
    }

    fn spawn_flows(&mut self, cfg: &ScenarioConfig) -> Result<(), ConfigError> {
        for (i, spec) in cfg.flows.iter().enumerate() {
            let src = self.node_index(&spec.src);
            let dst = self.node_index(&spec.dst);
            let jitter = if spec.start_jitter_s > 0.0 {
                self.rng.gen_range(0.0..spec.start_jitter_s)
            } else {
                0.0
            };
            let start = SimTime::from_secs_f64(spec.start_s + jitter);
            let transport = TransportConfig {
                seg_size: spec.seg_size.unwrap_or(cfg.transport.seg_size),
                ..cfg.transport.clone()
            };
            let (init_node, resp_node, init_bytes, resp_bytes, sender_role) = match spec.opener {
                Opener::Sender => (
                    src,
                    dst,
                    spec.size_bytes,
                    spec.reverse_bytes,
                    Role::Initiator,
                ),
                Opener::Receiver => (
                    dst,
                    src,
                    spec.reverse_bytes,
                    spec.size_bytes,
                    Role::Responder,
                ),
            };
            let mk = |role, local: usize, peer: usize, send_bytes| {
                Endpoint::new(EndpointConfig {
                    flow: FlowId(i as u32),
                    role,
                    local: NodeId(local as u32),
                    peer: NodeId(peer as u32),
                    algo: spec.algo,
                    send_bytes,
                    transport: transport.clone(),
                })
            };
            let mut rec = FlowRecord::new(i as u32, spec.class(), spec.algo, SERIES_BUCKET_S);
            rec.src = spec.src.clone();
            rec.dst = spec.dst.clone();
            rec.size_bytes = spec.size_bytes;
            rec.start_s = start.as_secs_f64();
            self.flow_records.push(rec);
            self.flows.push(FlowRuntime {
                spec: spec.clone(),
                initiator: mk(Role::Initiator, init_node, resp_node, init_bytes),
                responder: mk(Role::Responder, resp_node, init_node, resp_bytes),
                initiator_node: init_node,
                responder_node: resp_node,
                sender_role,
                completed: false,
            });
            self.calendar.schedule(start, Action::FlowStart(i));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Number of bidirectional links.
    pub fn link_count(&self) -> usize {
        self.channels.len() / 2
    }

    pub fn router_modes(&self) -> Vec<(String, MarkingMode)> {
        let mut modes: Vec<(String, MarkingMode)> = Vec::new();
        for ch in &self.channels {
            if let Some(q) = ch.router_queue() {
                let name = &self.nodes[ch.from].name;
                if !modes.iter().any(|(n, _)| n == name) {
                    modes.push((name.clone(), q.mode()));
                }
            }
        }
        modes
    }

    /// Names of the nodes a packet visits from `src` to `dst`, inclusive.
    pub fn path(&self, src: &str, dst: &str) -> Vec<String> {
        let (mut at, dst) = (self.node_index(src), self.node_index(dst));
        let mut names = vec![self.nodes[at].name.clone()];
        while at != dst {
            let ch = self.route[at][dst].expect("connected topology");
            at = self.channels[ch].to;
            names.push(self.nodes[at].name.clone());
        }
        names
    }

    // ---- event loop -----------------------------------------------------

    pub fn run(mut self, duration: SimDuration, opts: RunOptions) -> SimOutput {
        if opts.trace {
            self.trace = Some(TraceLog::default());
        }
        let end = SimTime::ZERO + duration;
        let mut last = SimTime::ZERO;
        while let Some(t) = self.calendar.peek_time() {
            if t >= end {
                break;
            }
            let (now, action) = self.calendar.pop().expect("peeked");
            assert!(now >= last, "event time regression");
            last = now;
            self.handle(now, action);
        }
        let end_time = if self.calendar.is_empty() { last } else { end };
        self.finish(end_time)
    }

    fn handle(&mut self, now: SimTime, action: Action) {
        match action {
            Action::FlowStart(f) => {
                let out = self.flows[f].initiator.open(now);
                self.apply(f, Role::Initiator, out, now);
            }
            Action::PacketArrival { node, packet } => {
                if node == packet.dst.0 as usize {
                    self.deliver(packet, now);
                } else {
                    self.forward(node, packet, now);
                }
            }
            Action::TransmitComplete(ch) => {
                let p = self.channels[ch]
                    .busy
                    .take()
                    .expect("link was transmitting");
                let arrive = now + self.channels[ch].delay;
                let node = self.channels[ch].to;
                self.calendar
                    .schedule(arrive, Action::PacketArrival { node, packet: p });
                self.try_transmit(ch, now);
            }
            Action::TimerExpiry {
                flow,
                role,
                generation,
            } => {
                let out = self.flows[flow].endpoint(role).on_timer(generation, now);
                self.apply(flow, role, out, now);
            }
        }
    }

    fn deliver(&mut self, p: Packet, now: SimTime) {
        let f = p.flow.0 as usize;
        self.conservation.delivered += 1;
        self.flow_records[f].delivered_packets += 1;
        let role = match p.dir {
            Direction::Forward => Role::Responder,
            Direction::Reverse => Role::Initiator,
        };
        let out = self.flows[f].endpoint(role).on_packet(&p, now);
        self.apply(f, role, out, now);
    }

    fn apply(&mut self, f: usize, role: Role, out: Outbox, now: SimTime) {
        let t = now.as_secs_f64();
        let is_sender = role == self.flows[f].sender_role;
        let is_receiver = role == self.flows[f].receiver_role();
        for ev in &out.events {
            let rec = &mut self.flow_records[f];
            match *ev {
                ConnEvent::RttSample(s) if is_sender => rec.rtt_samples.push((t, s)),
                ConnEvent::DataArrival { first_sent_at, .. } if is_receiver => {
                    rec.e2e_delays.push((now - first_sent_at).as_secs_f64());
                }
                ConnEvent::Delivered { total } if is_receiver => {
                    rec.delivered_bytes = total;
                    rec.delivered.record(t, total as f64);
                }
                ConnEvent::HandshakeComplete {
                    initial_segments, ..
                } if is_sender => rec.initial_cwnd_segments = Some(initial_segments),
                ConnEvent::Loss(LossKind::Timeout) if is_sender => rec.timeouts += 1,
                _ => {}
            }
            if self.trace.is_some() {
                let event = match ev {
                    ConnEvent::Reaction { .. } | ConnEvent::EcnReduction => Some("echo"),
                    ConnEvent::Loss(LossKind::TripleDupAck) => Some("loss"),
                    ConnEvent::Loss(LossKind::Timeout) => Some("rto"),
                    _ => None,
                };
                if let Some(event) = event {
                    let extra = match ev {
                        ConnEvent::Reaction { level, response } => {
                            format!("level={level} response={response:?}")
                        }
                        ConnEvent::EcnReduction => "level=CE response=Halve".into(),
                        _ => String::new(),
                    };
                    self.trace_conn(f, role, now, event, extra);
                }
            }
        }
        if let Some(req) = out.timer {
            self.calendar.schedule(
                req.at,
                Action::TimerExpiry {
                    flow: f,
                    role,
                    generation: req.generation,
                },
            );
        }
        let node = self.flows[f].node(role);
        for p in out.packets {
            self.inject(f, role, node, p, now);
        }
        if is_sender {
            let cwnd = self.flows[f].sender().window().cwnd;
            self.flow_records[f].cwnd.record(t, cwnd);
            self.flow_records[f].retransmits = self.flows[f].sender().stats().retransmits;
        }
        if !self.flows[f].completed && self.flows[f].done() {
            self.flows[f].completed = true;
            self.flow_records[f].completed_at_s = Some(t);
        }
    }

    fn trace_conn(
        &mut self,
        f: usize,
        role: Role,
        now: SimTime,
        event: &'static str,
        extra: String,
    ) {
        let flow = &self.flows[f];
        let ep = match role {
            Role::Initiator => &flow.initiator,
            Role::Responder => &flow.responder,
        };
        let w = ep.window();
        let ssthresh = if w.ssthresh.is_finite() {
            format!("{:.0}", w.ssthresh)
        } else {
            "inf".to_owned()
        };
        let mut detail = format!(
            "cwnd={:.3} ssthresh={ssthresh} phase={} seg={}",
            w.cwnd,
            ep.phase().name(),
            ep.config().transport.seg_size
        );
        if !extra.is_empty() {
            detail.push(' ');
            detail.push_str(&extra);
        }
        let entity = format!(
            "{}:{}",
            self.nodes[flow.node(role)].name,
            if role == flow.sender_role {
                "sender"
            } else {
                "receiver"
            }
        );
        if let Some(tr) = self.trace.as_mut() {
            tr.push(TraceRecord {
                time: now,
                entity,
                event,
                flow: Some(f as u32),
                detail,
            });
        }
    }

    fn inject(&mut self, f: usize, role: Role, node: usize, mut p: Packet, now: SimTime) {
        p.id = self.next_packet_id;
        self.next_packet_id += 1;
        self.conservation.injected += 1;
        let rec = &mut self.flow_records[f];
        rec.packets_sent += 1;
        rec.bytes_sent += u64::from(p.wire_size());
        if p.kind == SegmentKind::Data && role == self.flows[f].sender_role {
            rec.data_packets_sent += 1;
        }
        if self.trace.is_some() {
            let sig = p.flags.signal().decode();
            let event = match p.kind {
                SegmentKind::Syn => "syn",
                SegmentKind::SynAck => "synack",
                SegmentKind::Data if p.flags.cwr => "cwr",
                SegmentKind::Data => "data",
                SegmentKind::Ack => "ack",
            };
            let extra = format!(
                "id={} seq={} ack={} len={} ip={} tcp={sig:?}",
                p.id,
                p.seq,
                p.ack,
                p.len,
                p.ip.trace_name()
            );
            self.trace_conn(f, role, now, event, extra);
        }
        self.forward(node, p, now);
    }

    fn forward(&mut self, node: usize, p: Packet, now: SimTime) {
        let ch = self.route[node][p.dst.0 as usize].expect("route to destination");
        self.enqueue(ch, p, now);
    }

    fn trace_queue(
        &mut self,
        ch: usize,
        now: SimTime,
        event: &'static str,
        flow: u32,
        detail: String,
    ) {
        let entity = self.channels[ch].name.clone();
        if let Some(tr) = self.trace.as_mut() {
            tr.push(TraceRecord {
                time: now,
                entity,
                event,
                flow: Some(flow),
                detail,
            });
        }
    }

    fn enqueue(&mut self, ch: usize, p: Packet, now: SimTime) {
        let tracing = self.trace.is_some();
        let (id, flow, before, size) = (p.id, p.flow.0 as usize, p.ip, u64::from(p.wire_size()));
        match &mut self.channels[ch].egress {
            Egress::Host(q) => q.push_back(p),
            Egress::Router { queue, record } => {
                let record = *record;
                let outcome = queue.enqueue(p, now, &mut self.rng);
                let occ = queue.occupancy();
                let qr = &mut self.queue_records[record];
                qr.arrivals += 1;
                qr.occupancy.record(now.as_secs_f64(), occ as f64);
                match outcome {
                    EnqueueOutcome::Admitted { mark } => {
                        if let Some(m) = mark {
                            let fr = &mut self.flow_records[flow];
                            match m.after.level() {
                                CongestionLevel::Cl1 => {
                                    qr.marks_cl1 += 1;
                                    fr.marks_cl1 += 1;
                                }
                                CongestionLevel::Cl2 => {
                                    qr.marks_cl2 += 1;
                                    fr.marks_cl2 += 1;
                                }
                                CongestionLevel::None => unreachable!("marks raise the level"),
                            }
                            qr.mark_bytes += size;
                            fr.mark_bytes += size;
                        }
                        if tracing {
                            let detail = format!("id={id} cp={} occ={occ}", before.trace_name());
                            self.trace_queue(ch, now, "enqueue", flow as u32, detail);
                            if let Some(m) = mark {
                                let d = format!(
                                    "id={id} cp={}>{} occ={occ}",
                                    m.before.trace_name(),
                                    m.after.trace_name()
                                );
                                self.trace_queue(ch, now, "mark", flow as u32, d);
                            }
                        }
                    }
                    EnqueueOutcome::Dropped { packet, reason } => {
                        qr.drops += 1;
                        qr.drop_bytes += size;
                        self.conservation.dropped += 1;
                        let fr = &mut self.flow_records[flow];
                        fr.drops += 1;
                        fr.drop_bytes += size;
                        if tracing {
                            let d = format!(
                                "id={id} cp={} occ={occ} reason={}",
                                packet.ip.trace_name(),
                                reason.name()
                            );
                            self.trace_queue(ch, now, "drop", flow as u32, d);
                        }
                    }
                }
            }
        }
        self.try_transmit(ch, now);
    }

    fn try_transmit(&mut self, ch: usize, now: SimTime) {
        let c = &mut self.channels[ch];
        if c.busy.is_some() {
            return;
        }
        let (p, sojourn, record) = match &mut c.egress {
            Egress::Host(q) => match q.pop_front() {
                Some(p) => (p, None, None),
                None => return,
            },
            Egress::Router { queue, record } => {
                if queue.is_empty() {
                    return;
                }
                let (p, s) = queue.dequeue(now);
                (p, Some(s), Some((*record, queue.occupancy())))
            }
        };
        let done = now + SimDuration::serialization(p.wire_size(), c.rate_bps);
        if let (Some((r, occ)), Some(s)) = (record, sojourn) {
            let qr = &mut self.queue_records[r];
            qr.dequeued += 1;
            qr.sojourn.push(s.as_secs_f64());
            qr.occupancy.record(now.as_secs_f64(), occ as f64);
            if self.trace.is_some() {
                let d = format!(
                    "id={} cp={} occ={occ} sojourn={:.9}",
                    p.id,
                    p.ip.trace_name(),
                    s.as_secs_f64()
                );
                let flow = p.flow.0;
                self.trace_queue(ch, now, "dequeue", flow, d);
            }
        }
        self.channels[ch].busy = Some(p);
        self.calendar.schedule(done, Action::TransmitComplete(ch));
    }

    fn finish(mut self, end: SimTime) -> SimOutput {
        let mut resident_total = 0u64;
        let mut per_flow = vec![0u64; self.flows.len()];
        for ch in &self.channels {
            for p in ch.resident() {
                resident_total += 1;
                per_flow[p.flow.0 as usize] += 1;
            }
        }
        for (_, a) in self.calendar.iter() {
            if let Action::PacketArrival { packet, .. } = a {
                resident_total += 1;
                per_flow[packet.flow.0 as usize] += 1;
            }
        }
        for ch in &self.channels {
            if let Egress::Router { queue, record } = &ch.egress {
                self.queue_records[*record].resident = queue.occupancy() as u64;
            }
        }
        for (rec, n) in self.flow_records.iter_mut().zip(per_flow) {
            rec.resident_packets = n;
        }
        self.conservation.resident = resident_total;
        let run = RunData {
            scenario: self.name,
            seed: self.seed,
            algo: self.algo_label,
            end_s: end.as_secs_f64(),
            flows: self.flow_records,
            queues: self.queue_records,
            conservation: self.conservation,
        };
        SimOutput {
            report: metrics::summarize(&run),
            trace: self.trace,
        }
    }
}

/// Builds a dumbbell world; rejects other topology kinds.
pub fn build_dumbbell(cfg: &ScenarioConfig) -> Result<SimWorld, ConfigError> {
    if cfg.topology.kind != TopologyKind::Dumbbell {
        return Err(ConfigError::new("topology.kind", "expected dumbbell"));
    }
    SimWorld::build_line(cfg, cfg.seed)
}

/// Builds a multi-router path; rejects other topology kinds.
pub fn build_multihop(cfg: &ScenarioConfig) -> Result<SimWorld, ConfigError> {
    if cfg.topology.kind != TopologyKind::Multihop {
        return Err(ConfigError::new("topology.kind", "expected multihop"));
    }
    SimWorld::build_line(cfg, cfg.seed)
}

pub fn build(cfg: &ScenarioConfig) -> Result<SimWorld, ConfigError> {
    match cfg.topology.kind {
        TopologyKind::Dumbbell => build_dumbbell(cfg),
        TopologyKind::Multihop => build_multihop(cfg),
    }
}

/// Builds and runs `cfg` for its configured duration.
pub fn simulate(cfg: &ScenarioConfig, opts: RunOptions) -> Result<SimOutput, ConfigError> {
    let world = build(cfg)?;
    Ok(world.run(SimDuration::from_secs_f64(cfg.duration_s), opts))
}
