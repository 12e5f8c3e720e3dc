//! The four study cases and the two bound sweeps shipped with the tool.

use crate::density::Interval;
use crate::experiment::{CaseSpec, ReferenceFamily};

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).expect("preset interval")
}

/// Mass constraint only on `[0, 1]`; the solution is the uniform density.
pub fn uniform_case() -> CaseSpec {
    CaseSpec {
        name: "uniform".into(),
        interval: iv(0.0, 1.0),
        moments: vec![1.0],
        reference: ReferenceFamily::Uniform,
        n: 400,
        sweep: None,
    }
}

/// Mean 0.04 on `[0, 0.1]`; compared against the truncated exponential.
pub fn texp_case() -> CaseSpec {
    CaseSpec {
        name: "texp".into(),
        interval: iv(0.0, 0.1),
        moments: vec![1.0, 0.04],
        reference: ReferenceFamily::TruncatedExponential,
        n: 400,
        sweep: None,
    }
}

/// Mean 0, variance 0.001 on `[-0.1, 0.1]`; compared against Beta(4.5, 4.5).
pub fn bell_case() -> CaseSpec {
    CaseSpec {
        name: "bell".into(),
        interval: iv(-0.1, 0.1),
        moments: vec![1.0, 0.0, 0.001],
        reference: ReferenceFamily::ScaledBeta,
        n: 400,
        sweep: None,
    }
}

/// Mean 0, variance 0.005 on `[-0.1, 0.1]`; compared against Beta(0.5, 0.5).
pub fn bowl_case() -> CaseSpec {
    CaseSpec {
        name: "bowl".into(),
        interval: iv(-0.1, 0.1),
        moments: vec![1.0, 0.0, 0.005],
        reference: ReferenceFamily::ScaledBeta,
        n: 400,
        sweep: None,
    }
}

/// The mean-0.04 case solved on doubling upper bounds.
pub fn texp_sweep() -> CaseSpec {
    CaseSpec {
        name: "texp_sweep".into(),
        sweep: Some(vec![iv(0.0, 0.1), iv(0.0, 0.2), iv(0.0, 0.4), iv(0.0, 0.8)]),
        ..texp_case()
    }
}

/// The bell case solved on symmetrically doubling supports.
pub fn bell_sweep() -> CaseSpec {
    CaseSpec {
        name: "bell_sweep".into(),
        sweep: Some(vec![iv(-0.1, 0.1), iv(-0.2, 0.2), iv(-0.4, 0.4)]),
        ..bell_case()
    }
}

/// All single-interval presets, in report order.
pub fn all_cases() -> Vec<CaseSpec> {
    vec![uniform_case(), texp_case(), bell_case(), bowl_case()]
}

/// Look up any preset (case or sweep) by name.
pub fn by_name(name: &str) -> Option<CaseSpec> {
    match name {
        "uniform" => Some(uniform_case()),
        "texp" => Some(texp_case()),
        "bell" => Some(bell_case()),
        "bowl" => Some(bowl_case()),
        "texp_sweep" => Some(texp_sweep()),
        "bell_sweep" => Some(bell_sweep()),
        _ => None,
    }
}
