//! Receiver-side echo obligations.

use crate::codepoint::{
    coexist_map_ecn_to_eecn, decode_ip_ecn, CongestionLevel, EcnCodepoint, IpEcn,
};

/// Number of ACKs that repeat a level-1 echo.
pub const CL1_ECHO_ACKS: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoMode {
    Eecn,
    Ecn,
    Off,
}

/// ECE/CWR bits for an outgoing pure ACK and the level they convey.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AckSignal {
    pub ece: bool,
    pub cwr: bool,
    pub level: CongestionLevel,
}

#[derive(Debug, Clone)]
pub struct EchoState {
    mode: EchoMode,
    pending_cl2: bool,
    cl1_remaining: u8,
}

impl EchoState {
    pub fn new(mode: EchoMode) -> Self {
        Self {
            mode,
            pending_cl2: false,
            cl1_remaining: 0,
        }
    }

    pub fn mode(&self) -> EchoMode {
        self.mode
    }

    pub fn cl1_remaining(&self) -> u8 {
        self.cl1_remaining
    }

    pub fn pending_cl2(&self) -> bool {
        self.pending_cl2
    }

    /// Level-2 echo runs until CWR; level-1 echo covers the next three ACKs.
    pub fn receiver_on_marked_packet(&mut self, level: CongestionLevel) {
        match level {
            CongestionLevel::Cl2 => self.pending_cl2 = true,
            CongestionLevel::Cl1 => self.cl1_remaining = CL1_ECHO_ACKS,
            CongestionLevel::None => {}
        }
    }

    /// Processes an arriving data segment. CWR is applied before the segment's own mark.
    pub fn on_data(&mut self, ip: EcnCodepoint, cwr: bool) {
        if cwr {
            self.pending_cl2 = false;
        }
        let level = match self.mode {
            EchoMode::Eecn => coexist_map_ecn_to_eecn(ip),
            EchoMode::Ecn => {
                if decode_ip_ecn(ip) == IpEcn::Ce {
                    CongestionLevel::Cl2
                } else {
                    CongestionLevel::None
                }
            }
            EchoMode::Off => CongestionLevel::None,
        };
        self.receiver_on_marked_packet(level);
    }

    /// Signal for the next pure ACK, consuming one level-1 repetition if used.
    pub fn next_ack(&mut self) -> AckSignal {
        match self.mode {
            EchoMode::Off => AckSignal {
                ece: false,
                cwr: false,
                level: CongestionLevel::None,
            },
            EchoMode::Ecn => AckSignal {
                ece: self.pending_cl2,
                cwr: false,
                level: if self.pending_cl2 {
                    CongestionLevel::Cl2
                } else {
                    CongestionLevel::None
                },
            },
            EchoMode::Eecn => {
                if self.pending_cl2 {
                    AckSignal {
                        ece: true,
                        cwr: true,
                        level: CongestionLevel::Cl2,
                    }
                } else if self.cl1_remaining > 0 {
                    self.cl1_remaining -= 1;
                    AckSignal {
                        ece: true,
                        cwr: false,
                        level: CongestionLevel::Cl1,
                    }
                } else {
                    // plain ACK on an EECN connection still reads as "capable"
                    AckSignal {
                        ece: false,
                        cwr: true,
                        level: CongestionLevel::None,
                    }
                }
            }
        }
    }
}
