//! ECN/EECN codepoints in the IP and TCP headers.
//!
//! The IP field is two bits, CE (bit 15) and ECT (bit 14). Under EECN the four
//! values are read as not-capable, capable, congestion level 1 and congestion
//! level 2. Under classic ECN the same values are Not-ECT, ECT(1), ECT(0) and CE.
//!
//! The TCP signal is read from ECE (bit 9) and CWR (bit 8) together with the SYN
//! and ACK flags. Only named bits are exposed; there is no raw header layout.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Severity of congestion carried by a packet or echoed by a receiver.
///
/// Ordered `None < Cl1 < Cl2`; routers never move a packet down this order.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub enum CongestionLevel {
    #[default]
    None,
    Cl1,
    Cl2,
}

impl CongestionLevel {
    pub const ALL: [CongestionLevel; 3] = [Self::None, Self::Cl1, Self::Cl2];

    pub fn is_congested(self) -> bool {
        self != Self::None
    }
}

impl fmt::Display for CongestionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Cl1 => "CL1",
            Self::Cl2 => "CL2",
        })
    }
}

/// The two ECN bits of the IP header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct EcnCodepoint {
    /// Bit 15.
    pub ce: bool,
    /// Bit 14.
    pub ect: bool,
}

/// EECN reading of the IP codepoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IpEecn {
    NotCapable,
    Capable,
    Cl1,
    Cl2,
}

/// Classic ECN reading of the IP codepoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IpEcn {
    NotEct,
    Ect1,
    Ect0,
    Ce,
}

impl EcnCodepoint {
    pub const NOT_ECT: Self = Self::new(false, false);
    /// `01`: ECT(1), which is "EECN capable" under EECN.
    pub const ECT1: Self = Self::new(false, true);
    /// `10`: ECT(0) under ECN, CL(1) under EECN.
    pub const ECT0: Self = Self::new(true, false);
    /// `11`: CE under ECN, CL(2) under EECN.
    pub const CE: Self = Self::new(true, true);

    pub const ALL: [Self; 4] = [Self::NOT_ECT, Self::ECT1, Self::ECT0, Self::CE];

    pub const fn new(ce: bool, ect: bool) -> Self {
        Self { ce, ect }
    }

    /// A packet a router may mark instead of dropping. Same answer under both readings.
    pub fn is_markable(self) -> bool {
        self.ce != self.ect
    }

    /// Congestion level the packet currently carries under the EECN reading.
    pub fn level(self) -> CongestionLevel {
        match decode_ip_eecn(self) {
            IpEecn::Cl1 => CongestionLevel::Cl1,
            IpEecn::Cl2 => CongestionLevel::Cl2,
            IpEecn::NotCapable | IpEecn::Capable => CongestionLevel::None,
        }
    }

    /// Name used in trace exports.
    pub fn trace_name(self) -> &'static str {
        match decode_ip_eecn(self) {
            IpEecn::NotCapable => "NotECT",
            IpEecn::Capable => "ECT1",
            IpEecn::Cl1 => "CL1",
            IpEecn::Cl2 => "CL2",
        }
    }
}

impl fmt::Display for EcnCodepoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.trace_name())
    }
}

pub fn decode_ip_eecn(cp: EcnCodepoint) -> IpEecn {
    match (cp.ce, cp.ect) {
        (false, false) => IpEecn::NotCapable,
        (false, true) => IpEecn::Capable,
        (true, false) => IpEecn::Cl1,
        (true, true) => IpEecn::Cl2,
    }
}

pub fn encode_ip_eecn(meaning: IpEecn) -> EcnCodepoint {
    match meaning {
        IpEecn::NotCapable => EcnCodepoint::NOT_ECT,
        IpEecn::Capable => EcnCodepoint::ECT1,
        IpEecn::Cl1 => EcnCodepoint::ECT0,
        IpEecn::Cl2 => EcnCodepoint::CE,
    }
}

pub fn decode_ip_ecn(cp: EcnCodepoint) -> IpEcn {
    match (cp.ce, cp.ect) {
        (false, false) => IpEcn::NotEct,
        (false, true) => IpEcn::Ect1,
        (true, false) => IpEcn::Ect0,
        (true, true) => IpEcn::Ce,
    }
}

pub fn encode_ip_ecn(meaning: IpEcn) -> EcnCodepoint {
    match meaning {
        IpEcn::NotEct => EcnCodepoint::NOT_ECT,
        IpEcn::Ect1 => EcnCodepoint::ECT1,
        IpEcn::Ect0 => EcnCodepoint::ECT0,
        IpEcn::Ce => EcnCodepoint::CE,
    }
}

/// How an EECN host reads a codepoint that crossed a classic ECN router.
///
/// CE is the severe level; ECT(0) lines up with CL(1).
pub fn coexist_map_ecn_to_eecn(cp: EcnCodepoint) -> CongestionLevel {
    match decode_ip_ecn(cp) {
        IpEcn::Ce => CongestionLevel::Cl2,
        IpEcn::Ect0 => CongestionLevel::Cl1,
        IpEcn::Ect1 | IpEcn::NotEct => CongestionLevel::None,
    }
}

/// ECE/CWR bits with the SYN/ACK context needed to read them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TcpEcnSignal {
    pub ece: bool,
    pub cwr: bool,
    pub syn: bool,
    pub ack: bool,
}

/// EECN reading of the TCP signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TcpEecn {
    NotCapable,
    Capable,
    Cl1Echo,
    Cl2Echo,
    Cwr,
    /// A combination the EECN table does not list.
    Undefined,
}

impl TcpEecn {
    pub fn echoed_level(self) -> Option<CongestionLevel> {
        match self {
            Self::Capable => Some(CongestionLevel::None),
            Self::Cl1Echo => Some(CongestionLevel::Cl1),
            Self::Cl2Echo => Some(CongestionLevel::Cl2),
            _ => None,
        }
    }

    /// Whether a handshake segment carrying this signal negotiates EECN.
    /// `Undefined` is treated as not capable.
    pub fn negotiates_eecn(self) -> bool {
        matches!(self, Self::Capable | Self::Cl1Echo | Self::Cl2Echo)
    }
}

impl TcpEcnSignal {
    pub const fn new(ece: bool, cwr: bool, syn: bool, ack: bool) -> Self {
        Self { ece, cwr, syn, ack }
    }

    pub fn decode(self) -> TcpEecn {
        decode_tcp_eecn(self)
    }

    /// Enumerates all sixteen (ece, cwr, syn, ack) combinations.
    pub fn all() -> impl Iterator<Item = Self> {
        (0u8..16).map(|b| Self::new(b & 8 != 0, b & 4 != 0, b & 2 != 0, b & 1 != 0))
    }
}

pub fn decode_tcp_eecn(sig: TcpEcnSignal) -> TcpEecn {
    let TcpEcnSignal { ece, cwr, syn, ack } = sig;
    match (ece, cwr, syn, ack) {
        (false, false, true, _) => TcpEecn::NotCapable,
        (false, true, true, false) => TcpEecn::Capable,
        (false, true, _, true) => TcpEecn::Capable,
        (true, false, _, true) => TcpEecn::Cl1Echo,
        (true, true, _, true) => TcpEecn::Cl2Echo,
        (false, true, false, false) => TcpEecn::Cwr,
        _ => TcpEecn::Undefined,
    }
}

/// ECE/CWR bits an EECN host writes for a given meaning; SYN/ACK come from the segment.
pub fn encode_tcp_eecn(meaning: TcpEecn) -> Option<(bool, bool)> {
    match meaning {
        TcpEecn::NotCapable => Some((false, false)),
        TcpEecn::Capable | TcpEecn::Cwr => Some((false, true)),
        TcpEecn::Cl1Echo => Some((true, false)),
        TcpEecn::Cl2Echo => Some((true, true)),
        TcpEecn::Undefined => None,
    }
}

pub fn echo_signal_for(level: CongestionLevel) -> TcpEecn {
    match level {
        CongestionLevel::None => TcpEecn::Capable,
        CongestionLevel::Cl1 => TcpEecn::Cl1Echo,
        CongestionLevel::Cl2 => TcpEecn::Cl2Echo,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(ece: u8, cwr: u8, syn: u8, ack: u8) -> TcpEcnSignal {
        TcpEcnSignal::new(ece == 1, cwr == 1, syn == 1, ack == 1)
    }

    #[test]
    fn ip_table_rows() {
        assert_eq!(
            decode_ip_eecn(EcnCodepoint::new(false, true)),
            IpEecn::Capable
        );
        assert_eq!(decode_ip_eecn(EcnCodepoint::new(true, true)), IpEecn::Cl2);
        assert_eq!(
            decode_ip_eecn(EcnCodepoint::new(false, false)),
            IpEecn::NotCapable
        );
        assert_eq!(encode_ip_eecn(IpEecn::Cl1), EcnCodepoint::new(true, false));
        assert_eq!(
            encode_ip_eecn(IpEecn::Capable),
            EcnCodepoint::new(false, true)
        );
        assert_eq!(
            encode_ip_eecn(IpEecn::NotCapable),
            EcnCodepoint::new(false, false)
        );
    }

    #[test]
    fn tcp_table_rows() {
        // Every listed row of the EECN TCP flag table.
        let rows = [
            (sig(0, 0, 1, 0), TcpEecn::NotCapable),
            (sig(0, 0, 1, 1), TcpEecn::NotCapable),
            (sig(0, 1, 1, 0), TcpEecn::Capable),
            (sig(0, 1, 1, 1), TcpEecn::Capable),
            (sig(0, 1, 0, 1), TcpEecn::Capable),
            (sig(1, 0, 1, 1), TcpEecn::Cl1Echo),
            (sig(1, 0, 0, 1), TcpEecn::Cl1Echo),
            (sig(1, 1, 1, 1), TcpEecn::Cl2Echo),
            (sig(1, 1, 0, 1), TcpEecn::Cl2Echo),
            (sig(0, 1, 0, 0), TcpEecn::Cwr),
        ];
        for (s, want) in rows {
            assert_eq!(decode_tcp_eecn(s), want, "{s:?}");
        }
    }

    #[test]
    fn unlisted_tcp_rows_are_undefined() {
        let undefined: Vec<_> = TcpEcnSignal::all()
            .filter(|s| decode_tcp_eecn(*s) == TcpEecn::Undefined)
            .collect();
        assert!(undefined.contains(&sig(1, 0, 0, 0)));
        assert!(undefined.contains(&sig(1, 1, 0, 0)));
        // A classic ECN setup SYN is not an EECN offer.
        assert!(undefined.contains(&sig(1, 1, 1, 0)));
        assert!(!TcpEecn::Undefined.negotiates_eecn());
        assert_eq!(undefined.len(), 6);
    }

    #[test]
    fn cwr_depends_on_syn_ack_context() {
        assert_eq!(sig(0, 1, 0, 0).decode(), TcpEecn::Cwr);
        assert_eq!(sig(0, 1, 1, 0).decode(), TcpEecn::Capable);
        assert_eq!(sig(0, 1, 0, 1).decode(), TcpEecn::Capable);
    }

    #[test]
    fn coexistence_mapping() {
        assert_eq!(
            coexist_map_ecn_to_eecn(EcnCodepoint::CE),
            CongestionLevel::Cl2
        );
        assert_eq!(
            coexist_map_ecn_to_eecn(EcnCodepoint::ECT0),
            CongestionLevel::Cl1
        );
        assert_eq!(
            coexist_map_ecn_to_eecn(EcnCodepoint::ECT1),
            CongestionLevel::None
        );
    }

    #[test]
    fn readings_agree_on_severity_and_markability() {
        for cp in EcnCodepoint::ALL {
            assert_eq!(
                decode_ip_eecn(cp) == IpEecn::Cl2,
                decode_ip_ecn(cp) == IpEcn::Ce,
                "{cp:?}"
            );
            let ecn_markable = matches!(decode_ip_ecn(cp), IpEcn::Ect0 | IpEcn::Ect1);
            let eecn_markable = matches!(decode_ip_eecn(cp), IpEecn::Capable | IpEecn::Cl1);
            assert_eq!(ecn_markable, cp.is_markable());
            assert_eq!(eecn_markable, cp.is_markable());
        }
        assert!(!EcnCodepoint::NOT_ECT.is_markable());
    }

    #[test]
    fn round_trips() {
        for cp in EcnCodepoint::ALL {
            assert_eq!(encode_ip_eecn(decode_ip_eecn(cp)), cp);
            assert_eq!(encode_ip_ecn(decode_ip_ecn(cp)), cp);
        }
        for s in TcpEcnSignal::all() {
            let meaning = decode_tcp_eecn(s);
            if let Some((ece, cwr)) = encode_tcp_eecn(meaning) {
                assert_eq!((ece, cwr), (s.ece, s.cwr), "{s:?}");
            }
        }
    }

    #[test]
    fn trace_names() {
        let names: Vec<_> = EcnCodepoint::ALL.iter().map(|c| c.trace_name()).collect();
        assert_eq!(names, ["NotECT", "ECT1", "CL1", "CL2"]);
    }

    #[test]
    fn level_order() {
        assert!(CongestionLevel::None < CongestionLevel::Cl1);
        assert!(CongestionLevel::Cl1 < CongestionLevel::Cl2);
    }
}
