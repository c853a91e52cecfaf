use serde::{Deserialize, Serialize};

use crate::codepoint::{EcnCodepoint, TcpEcnSignal};
use crate::time::SimTime;

/// Bytes of IP + TCP header added to every segment on the wire.
pub const HEADER_BYTES: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FlowId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

/// Which end of a connection a segment travels toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Initiator to responder.
    Forward,
    /// Responder to initiator.
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TcpFlags {
    pub syn: bool,
    pub ack: bool,
    pub ece: bool,
    pub cwr: bool,
}

impl TcpFlags {
    pub fn signal(self) -> TcpEcnSignal {
        TcpEcnSignal::new(self.ece, self.cwr, self.syn, self.ack)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    Syn,
    SynAck,
    /// Pure acknowledgement, including the handshake-completing one.
    Ack,
    Data,
}

impl SegmentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Syn => "syn",
            Self::SynAck => "synack",
            Self::Ack => "ack",
            Self::Data => "data",
        }
    }
}

/// A simulated segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Packet {
    /// Assigned by the engine on injection; unique per run.
    pub id: u64,
    pub flow: FlowId,
    pub dir: Direction,
    pub src: NodeId,
    pub dst: NodeId,
    pub kind: SegmentKind,
    pub seq: u64,
    pub ack: u64,
    /// Application payload bytes.
    pub len: u32,
    pub flags: TcpFlags,
    pub ip: EcnCodepoint,
    /// Time this copy left the sending host.
    pub sent_at: SimTime,
    /// Time the first copy of this payload left the sending host.
    pub first_sent_at: SimTime,
    pub retransmit: bool,
    /// Echo of the `sent_at` of the segment that triggered this ACK, with its retransmit flag.
    pub ts_echo: Option<(SimTime, bool)>,
}

impl Packet {
    pub fn wire_size(&self) -> u32 {
        self.len + HEADER_BYTES
    }

    pub fn end_seq(&self) -> u64 {
        self.seq + u64::from(self.len)
    }
}
