use super::*;
use crate::codepoint::{CongestionLevel, EcnCodepoint, TcpEecn};
use crate::packet::{FlowId, NodeId, Packet, SegmentKind};
use crate::time::{SimDuration, SimTime};

fn pair(algo: Algorithm, peer_algo: Algorithm, bytes: u64) -> (Endpoint, Endpoint) {
    let mk = |role, algo, local, peer, send_bytes| {
        Endpoint::new(EndpointConfig {
            flow: FlowId(1),
            role,
            local: NodeId(local),
            peer: NodeId(peer),
            algo,
            send_bytes,
            transport: TransportConfig::default(),
        })
    };
    (
        mk(Role::Initiator, algo, 0, 1, bytes),
        mk(Role::Responder, peer_algo, 1, 0, 0),
    )
}

fn ms(n: u64) -> SimTime {
    SimTime::ZERO + SimDuration::from_millis(n)
}

fn only(out: &Outbox, kind: SegmentKind) -> Packet {
    assert_eq!(out.packets.len(), 1, "{:?}", out.packets);
    assert_eq!(out.packets[0].kind, kind);
    out.packets[0].clone()
}

/// Runs a handshake where `mark_syn` / `mark_synack` overwrite the IP field in flight.
fn handshake(
    a: &mut Endpoint,
    b: &mut Endpoint,
    mark_syn: Option<EcnCodepoint>,
    mark_synack: Option<EcnCodepoint>,
) -> Outbox {
    let mut syn = only(&a.open(ms(0)), SegmentKind::Syn);
    if let Some(cp) = mark_syn {
        syn.ip = cp;
    }
    let mut synack = only(&b.on_packet(&syn, ms(10)), SegmentKind::SynAck);
    if let Some(cp) = mark_synack {
        synack.ip = cp;
    }
    let out = a.on_packet(&synack, ms(20));
    let ack = out.packets[0].clone();
    assert_eq!(ack.kind, SegmentKind::Ack);
    b.on_packet(&ack, ms(30));
    out
}

#[test]
fn eecn_syn_bits() {
    let (mut a, _) = pair(Algorithm::Eecn, Algorithm::Eecn, 0);
    let syn = only(&a.open(ms(0)), SegmentKind::Syn);
    assert_eq!(syn.flags.signal().decode(), TcpEecn::Capable);
    assert_eq!(syn.ip, EcnCodepoint::ECT1);
}

#[test]
fn clean_handshake_gives_ten_segments() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, 100_000);
    let out = handshake(&mut a, &mut b, None, None);
    assert_eq!(a.negotiated(), Negotiated::Eecn);
    assert_eq!(b.negotiated(), Negotiated::Eecn);
    assert_eq!(a.window().cwnd, 10_000.0);
    assert_eq!(b.window().cwnd, 10_000.0);
    // final ACK plus ten data segments
    assert_eq!(out.packets.len(), 11);
    assert!(out.packets[1..].iter().all(|p| p.ip == EcnCodepoint::ECT1));
}

#[test]
fn cl2_on_syn_shrinks_initiator_window() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, 0);
    handshake(&mut a, &mut b, Some(EcnCodepoint::CE), None);
    assert_eq!(a.window().cwnd, 1_000.0);
    assert_eq!(b.window().cwnd, 10_000.0);
    assert_eq!(a.outcome().unwrap().observed_level, CongestionLevel::Cl2);
}

#[test]
fn cl1_on_synack_halves_responder_window() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, 0);
    handshake(&mut a, &mut b, None, Some(EcnCodepoint::ECT0));
    assert_eq!(b.window().cwnd, 5_000.0);
    assert_eq!(a.window().cwnd, 10_000.0);
}

#[test]
fn both_control_packets_marked() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, 0);
    handshake(
        &mut a,
        &mut b,
        Some(EcnCodepoint::ECT0),
        Some(EcnCodepoint::CE),
    );
    assert_eq!(a.window().cwnd, 5_000.0);
    assert_eq!(b.window().cwnd, 1_000.0);
}

#[test]
fn synack_echo_reports_syn_level() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, 0);
    let mut syn = only(&a.open(ms(0)), SegmentKind::Syn);
    syn.ip = EcnCodepoint::ECT0;
    let synack = only(&b.on_packet(&syn, ms(10)), SegmentKind::SynAck);
    assert_eq!(synack.flags.signal().decode(), TcpEecn::Cl1Echo);
    // the responder's own window is only fixed once the echo comes back
    assert!(!b.is_established());
}

#[test]
fn legacy_peer_disables_eecn() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::NewReno, 10_000);
    let out = handshake(&mut a, &mut b, None, None);
    assert_eq!(a.negotiated(), Negotiated::None);
    assert_eq!(a.window().cwnd, 10_000.0);
    assert!(out.packets[1..]
        .iter()
        .all(|p| p.ip == EcnCodepoint::NOT_ECT));
}

#[test]
fn ecn_negotiation() {
    let (mut a, mut b) = pair(Algorithm::NewRenoEcn, Algorithm::NewRenoEcn, 10_000);
    let out = handshake(&mut a, &mut b, None, None);
    assert_eq!(a.negotiated(), Negotiated::Ecn);
    assert_eq!(b.negotiated(), Negotiated::Ecn);
    assert!(out.packets[1..].iter().all(|p| p.ip == EcnCodepoint::ECT0));
}

#[test]
fn undefined_syn_is_not_capable() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, 0);
    let mut syn = only(&a.open(ms(0)), SegmentKind::Syn);
    syn.flags.ece = true;
    syn.flags.cwr = false;
    assert_eq!(syn.flags.signal().decode(), TcpEecn::Undefined);
    b.on_packet(&syn, ms(10));
    assert_eq!(b.negotiated(), Negotiated::None);
}

fn established(bytes: u64) -> (Endpoint, Endpoint, Vec<Packet>) {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, bytes);
    let out = handshake(&mut a, &mut b, None, None);
    let data = out.packets[1..].to_vec();
    (a, b, data)
}

#[test]
fn receiver_echoes_cl1_three_times() {
    let (_, mut b, data) = established(100_000);
    let mut first = data[0].clone();
    first.ip = EcnCodepoint::ECT0;
    let mut levels = vec![];
    for (i, p) in std::iter::once(first)
        .chain(data[1..5].iter().cloned())
        .enumerate()
    {
        let out = b.on_packet(&p, ms(40 + i as u64));
        let ack = only(&out, SegmentKind::Ack);
        levels.push(ack.flags.signal().decode());
    }
    assert_eq!(
        levels,
        [
            TcpEecn::Cl1Echo,
            TcpEecn::Cl1Echo,
            TcpEecn::Cl1Echo,
            TcpEecn::Capable,
            TcpEecn::Capable
        ]
    );
}

#[test]
fn cl2_echo_reduces_and_sets_cwr() {
    let (mut a, mut b, data) = established(1_000_000);
    let mut p = data[0].clone();
    p.ip = EcnCodepoint::CE;
    let ack = only(&b.on_packet(&p, ms(45)), SegmentKind::Ack);
    assert_eq!(ack.flags.signal().decode(), TcpEecn::Cl2Echo);
    // avg RTT 20 ms from the handshake; this sample is 5 ms later, so RTT rises
    let out = a.on_packet(&ack, ms(45));
    assert!(out.events.iter().any(|e| matches!(
        e,
        ConnEvent::Reaction {
            level: CongestionLevel::Cl2,
            ..
        }
    )));
    assert_eq!(a.window().cwnd, 2_000.0);
    assert_eq!(a.phase(), Phase::CongestionAvoidance);
    // flight is 9 segments, so nothing new goes out; CWR rides the next data segment
    assert!(out.packets.is_empty());
    let mut acks = vec![];
    for p in &data[1..] {
        acks.push(only(&b.on_packet(p, ms(50)), SegmentKind::Ack));
    }
    let mut cwr_seen = false;
    for ack in acks {
        let out = a.on_packet(&ack, ms(60));
        for p in out.packets {
            if p.kind == SegmentKind::Data && p.flags.signal().decode() == TcpEecn::Cwr {
                cwr_seen = true;
            }
        }
    }
    assert!(cwr_seen);
}

#[test]
fn second_cl2_within_rtt_is_ignored() {
    let (mut a, mut b, data) = established(1_000_000);
    let mut p0 = data[0].clone();
    p0.ip = EcnCodepoint::CE;
    let ack0 = only(&b.on_packet(&p0, ms(45)), SegmentKind::Ack);
    let ack1 = only(&b.on_packet(&data[1], ms(45)), SegmentKind::Ack);
    assert_eq!(ack1.flags.signal().decode(), TcpEecn::Cl2Echo);
    a.on_packet(&ack0, ms(45));
    a.on_packet(&ack1, ms(46));
    assert_eq!(a.stats().severe_reductions, 1);
}

#[test]
fn triple_dupack_enters_recovery() {
    let (mut a, mut b, data) = established(1_000_000);
    // lose the first segment
    let mut out_acks = vec![];
    for p in &data[1..5] {
        out_acks.push(only(&b.on_packet(p, ms(40)), SegmentKind::Ack));
    }
    assert!(out_acks.iter().all(|a| a.ack == 0));
    let mut retx = vec![];
    for ack in &out_acks {
        let out = a.on_packet(ack, ms(50));
        retx.extend(out.packets.into_iter().filter(|p| p.retransmit));
    }
    assert_eq!(a.phase(), Phase::Recovery);
    assert_eq!(retx.len(), 1);
    assert_eq!(retx[0].seq, 0);
    assert_eq!(a.window().ssthresh, 5_000.0);
    let ack = only(&b.on_packet(&retx[0], ms(60)), SegmentKind::Ack);
    assert_eq!(ack.ack, 5_000);
    // partial ACK: the rest of the first flight is still outstanding
    let out = a.on_packet(&ack, ms(70));
    assert_eq!(a.phase(), Phase::Recovery);
    assert!(out.packets.iter().any(|p| p.retransmit && p.seq == 5_000));
}

#[test]
fn timeout_collapses_window() {
    let (mut a, _, _) = established(1_000_000);
    let generation = a.timer_generation();
    // initial RTO is 1 s, but the handshake sample lowers it to the 200 ms floor
    let fire = ms(20) + SimDuration::from_secs_f64(a.rtt().rto());
    let out = a.on_timer(generation, fire);
    assert_eq!(a.window().cwnd, 1_000.0);
    assert_eq!(a.window().ssthresh, 5_000.0);
    assert_eq!(out.packets.len(), 1);
    assert!(out.packets[0].retransmit);
    assert!(out.events.contains(&ConnEvent::Loss(LossKind::Timeout)));
}

#[test]
fn stale_timer_is_ignored() {
    let (mut a, _, _) = established(1_000_000);
    let stale = a.timer_generation() - 1;
    let out = a.on_timer(stale, ms(500));
    assert!(out.packets.is_empty());
    assert_eq!(a.window().cwnd, 10_000.0);
}

#[test]
fn lost_syn_is_retransmitted() {
    let (mut a, mut b) = pair(Algorithm::Eecn, Algorithm::Eecn, 1_000);
    let out = a.open(ms(0));
    let t = out.timer.unwrap();
    assert_eq!(t.at, ms(1_000));
    let out = a.on_timer(t.generation, t.at);
    let syn = only(&out, SegmentKind::Syn);
    assert!(syn.retransmit);
    let synack = only(&b.on_packet(&syn, ms(1_010)), SegmentKind::SynAck);
    a.on_packet(&synack, ms(1_020));
    // Karn: the retransmitted SYN gives no RTT sample
    assert_eq!(a.rtt().samples(), 0);
}

#[test]
fn transfer_completes_without_loss() {
    let (mut a, mut b, mut in_flight) = established(50_000);
    let mut now = 40;
    let mut guard = 0;
    while !in_flight.is_empty() {
        guard += 1;
        assert!(guard < 1_000);
        let mut acks = vec![];
        for p in in_flight.drain(..) {
            acks.extend(b.on_packet(&p, ms(now)).packets);
        }
        now += 10;
        for ack in acks {
            in_flight.extend(a.on_packet(&ack, ms(now)).packets);
        }
        now += 10;
    }
    assert_eq!(b.delivered(), 50_000);
    assert!(a.send_complete());
}

#[test]
fn window_never_below_one_segment() {
    let (mut a, mut b, data) = established(1_000_000);
    for (i, p) in data.iter().enumerate() {
        let mut p = p.clone();
        p.ip = EcnCodepoint::CE;
        let ack = only(&b.on_packet(&p, ms(45)), SegmentKind::Ack);
        a.on_packet(&ack, ms(45 + 30 * i as u64));
        assert!(a.window().cwnd >= 1_000.0);
    }
}

#[test]
fn algorithm_names_round_trip() {
    for a in Algorithm::ALL {
        assert_eq!(Algorithm::parse(a.name()), Some(a));
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Algorithm>(&json).unwrap(), a);
    }
}

#[test]
fn transport_config_validation() {
    assert!(TransportConfig::default().validate("transport").is_ok());
    let bad = TransportConfig {
        d: 1.0,
        ..TransportConfig::default()
    };
    assert_eq!(bad.validate("transport").unwrap_err().path, "transport.d");
}
