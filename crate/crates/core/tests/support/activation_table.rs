//! The decided activation-mode transition table for fault doubles, written
//! out by hand, and helpers to drive a registry through it.

use statetest_core::{ActivationState, DiagCode, DoubleRegistry, FunctionId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Set(i64),
    Consume,
    Enter,
    Exit,
}

pub const OPS: [Op; 8] = [
    Op::Set(-1),
    Op::Set(0),
    Op::Set(1),
    Op::Set(2),
    Op::Set(-2),
    Op::Consume,
    Op::Enter,
    Op::Exit,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Off,
    Always,
    C1,
    C2,
    R0,
    R1,
    R2,
    R3,
}

/// Every mode reachable within two operations from a fresh registry.
pub const MODES: [Mode; 7] = [
    Mode::Off,
    Mode::Always,
    Mode::C1,
    Mode::C2,
    Mode::R0,
    Mode::R1,
    Mode::R2,
];

/// What an operation reports: success, a consume outcome, or an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Out {
    Ok,
    Doubled(bool),
    Err(DiagCode),
}

use Mode::*;
use Op::*;
use Out::{Doubled, Ok as Done};

const BAD: Out = Out::Err(DiagCode::BadCount);
const UNDER: Out = Out::Err(DiagCode::RegionUnderflow);

#[rustfmt::skip]
pub const TABLE: [(Mode, Op, Out, Mode); 56] = [
    (Off,    Set(-1), Done, Always), (Off,    Set(0), Done, Off), (Off,    Set(1), Done, C1), (Off,    Set(2), Done, C2),
    (Off,    Set(-2), BAD, Off),     (Off,    Consume, Doubled(false), Off),  (Off,    Enter, Done, R1), (Off,    Exit, UNDER, Off),

    (Always, Set(-1), Done, Always), (Always, Set(0), Done, Off), (Always, Set(1), Done, C1), (Always, Set(2), Done, C2),
    (Always, Set(-2), BAD, Always),  (Always, Consume, Doubled(true), Always), (Always, Enter, Done, R1), (Always, Exit, UNDER, Always),

    (C1,     Set(-1), Done, Always), (C1,     Set(0), Done, Off), (C1,     Set(1), Done, C1), (C1,     Set(2), Done, C2),
    (C1,     Set(-2), BAD, C1),      (C1,     Consume, Doubled(true), Off),   (C1,     Enter, Done, R1), (C1,     Exit, UNDER, C1),

    (C2,     Set(-1), Done, Always), (C2,     Set(0), Done, Off), (C2,     Set(1), Done, C1), (C2,     Set(2), Done, C2),
    (C2,     Set(-2), BAD, C2),      (C2,     Consume, Doubled(true), C1),    (C2,     Enter, Done, R1), (C2,     Exit, UNDER, C2),

    (R0,     Set(-1), Done, Always), (R0,     Set(0), Done, Off), (R0,     Set(1), Done, C1), (R0,     Set(2), Done, C2),
    (R0,     Set(-2), BAD, R0),      (R0,     Consume, Doubled(false), R0),   (R0,     Enter, Done, R1), (R0,     Exit, UNDER, R0),

    (R1,     Set(-1), Done, Always), (R1,     Set(0), Done, Off), (R1,     Set(1), Done, C1), (R1,     Set(2), Done, C2),
    (R1,     Set(-2), BAD, R1),      (R1,     Consume, Doubled(true), R1),    (R1,     Enter, Done, R2), (R1,     Exit, Done, R0),

    (R2,     Set(-1), Done, Always), (R2,     Set(0), Done, Off), (R2,     Set(1), Done, C1), (R2,     Set(2), Done, C2),
    (R2,     Set(-2), BAD, R2),      (R2,     Consume, Doubled(true), R2),    (R2,     Enter, Done, R3), (R2,     Exit, Done, R1),
];

pub fn row(mode: Mode, op: Op) -> (Out, Mode) {
    let matches: Vec<_> = TABLE.iter().filter(|r| r.0 == mode && r.1 == op).collect();
    assert_eq!(
        matches.len(),
        1,
        "table must have exactly one row for {mode:?} x {op:?}"
    );
    (matches[0].2, matches[0].3)
}

pub fn as_state(mode: Mode) -> ActivationState {
    match mode {
        Off => ActivationState::Off,
        Always => ActivationState::Always,
        C1 => ActivationState::count(1),
        C2 => ActivationState::count(2),
        R0 => ActivationState::Region(0),
        R1 => ActivationState::Region(1),
        R2 => ActivationState::Region(2),
        R3 => ActivationState::Region(3),
    }
}

pub fn id() -> FunctionId {
    FunctionId::of("malloc")
}

/// Drives a fresh registry into `mode` through the public operations.
pub fn registry_in(mode: Mode) -> DoubleRegistry {
    let mut reg = DoubleRegistry::with_functions([id()]).unwrap();
    match mode {
        Off => {}
        Always => reg.set_status(&id(), -1).unwrap(),
        C1 => reg.set_status(&id(), 1).unwrap(),
        C2 => reg.set_status(&id(), 2).unwrap(),
        R0 => {
            reg.region_enter(&id()).unwrap();
            reg.region_exit(&id()).unwrap();
        }
        R1 => reg.region_enter(&id()).unwrap(),
        R2 | R3 => {
            let depth = if mode == R2 { 2 } else { 3 };
            for _ in 0..depth {
                reg.region_enter(&id()).unwrap();
            }
        }
    }
    assert_eq!(reg.state(&id()), Some(as_state(mode)));
    reg
}

pub fn perform(reg: &mut DoubleRegistry, op: Op) -> Out {
    let result = match op {
        Set(n) => reg.set_status(&id(), n).map(|_| Done),
        Consume => reg.consume(&id()).map(Doubled),
        Enter => reg.region_enter(&id()).map(|_| Done),
        Exit => reg.region_exit(&id()).map(|_| Done),
    };
    result.unwrap_or_else(|e| Out::Err(e.code()))
}

/// Checks every (mode, operation) pair against the table. Returns the number
/// of pairs checked.
pub fn check_table() -> Result<usize, String> {
    let mut checked = 0;
    for mode in MODES {
        for op in OPS {
            let (expected_out, expected_mode) = row(mode, op);
            let mut reg = registry_in(mode);
            let log_before = reg.call_log().len();
            let out = perform(&mut reg, op);
            if out != expected_out {
                return Err(format!(
                    "{mode:?} x {op:?}: got {out:?}, table says {expected_out:?}"
                ));
            }
            if reg.state(&id()) != Some(as_state(expected_mode)) {
                return Err(format!(
                    "{mode:?} x {op:?}: ended in {:?}",
                    reg.state(&id())
                ));
            }
            if reg.call_log().len() != log_before + usize::from(op == Consume) {
                return Err(format!("{mode:?} x {op:?}: call log length is wrong"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// Succeeds, fails once, succeeds, fails until switched off, succeeds.
pub fn out_of_memory_flags() -> Vec<bool> {
    let mut reg = registry_in(Off);
    let mut flags = vec![reg.consume(&id()).unwrap()];
    reg.set_status(&id(), 1).unwrap();
    flags.push(reg.consume(&id()).unwrap());
    flags.push(reg.consume(&id()).unwrap());
    reg.set_status(&id(), -1).unwrap();
    flags.push(reg.consume(&id()).unwrap());
    flags.push(reg.consume(&id()).unwrap());
    reg.set_status(&id(), 0).unwrap();
    flags.push(reg.consume(&id()).unwrap());
    flags
}
