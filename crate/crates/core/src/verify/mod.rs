//! Named verification suites with machine-readable reports.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub mod appendix;
mod dispersion;
mod nonlinear;
mod norms;

pub use appendix::{appendix_a_derivatives, lemma_a1_coefficients, AppendixSample};

/// Problem sizes: `Small` reproduces the acceptance configuration, `Full`
/// adds larger samples and extra dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Small,
    Full,
}

impl std::str::FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Tier::Small),
            "full" => Ok(Tier::Full),
            _ => Err(Error::InvalidParameter(format!("unknown tier {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `|measured - reference| <= tolerance`.
    Within,
    /// `measured <= reference + tolerance`.
    AtMost,
    /// `measured >= reference - tolerance`.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub quantity: String,
    pub parameters: String,
    pub measured: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn new(
        quantity: impl Into<String>,
        parameters: impl Into<String>,
        measured: f64,
        reference: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        let pass = match comparison {
            Comparison::Within => (measured - reference).abs() <= tolerance,
            Comparison::AtMost => measured <= reference + tolerance,
            Comparison::AtLeast => measured >= reference - tolerance,
        };
        Self {
            quantity: quantity.into(),
            parameters: parameters.into(),
            measured,
            reference,
            tolerance,
            comparison,
            pass,
        }
    }

    /// A boolean condition recorded as `1` against reference `1`.
    pub fn flag(quantity: impl Into<String>, parameters: impl Into<String>, ok: bool) -> Self {
        Self::new(quantity, parameters, if ok { 1.0 } else { 0.0 }, 1.0, 0.0, Comparison::Within)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub lemma_id: String,
    pub tier: Tier,
    pub seed: u64,
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    /// Diagnostics that do not enter the pass flag.
    pub notes: Vec<String>,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl VerificationReport {
    /// The first failing check, if any.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Suite output before the report is assembled.
#[derive(Default)]
pub(crate) struct Outcome {
    pub parameters: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

type SuiteFn = fn(Tier, &mut ChaCha8Rng) -> Result<Outcome>;

const SUITES: &[(&str, SuiteFn)] = &[
    ("partition", norms::partition),
    ("L2.1", norms::l2_1),
    ("L2.2", norms::l2_2),
    ("L2.3", norms::l2_3),
    ("L2.4-ii", norms::l2_4_ii),
    ("L2.4-iii", norms::l2_4_iii),
    ("L2.5", norms::l2_5),
    ("L2.7", norms::l2_7),
    ("L2.11", norms::l2_11),
    ("L3.2", dispersion::l3_2),
    ("L3.4", dispersion::l3_4),
    ("P3.6", dispersion::p3_6),
    ("L4.1", nonlinear::l4_1),
    ("T1.1-picard", nonlinear::t1_1_picard),
    ("T1.1-smoothing", nonlinear::t1_1_smoothing),
    ("T1.1-scaling", nonlinear::t1_1_scaling),
    ("T1.2-sinh", nonlinear::t1_2_sinh),
    ("L5.1", nonlinear::l5_1),
    ("R1.3-iii", nonlinear::r1_3_iii),
    ("A.1", appendix::a_1),
];

/// Every known suite id, in canonical order.
pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

fn suite_seed(seed: u64, id: &str) -> u64 {
    // FNV-1a over the id, mixed with the run seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ seed
}

fn run_one(id: &str, f: SuiteFn, tier: Tier, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(suite_seed(seed, id));
    let out = f(tier, &mut rng)?;
    let pass = !out.checks.is_empty() && out.checks.iter().all(|c| c.pass);
    Ok(VerificationReport {
        lemma_id: id.to_string(),
        tier,
        seed,
        parameters: out.parameters,
        checks: out.checks,
        notes: out.notes,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs the named suites in parallel; reports come back in the order of `ids`.
pub fn run_suite(ids: &[&str], tier: Tier, seed: u64) -> Result<Vec<VerificationReport>> {
    let jobs = ids
        .iter()
        .map(|id| {
            SUITES
                .iter()
                .find(|s| s.0 == *id)
                .map(|s| (s.0, s.1))
                .ok_or_else(|| Error::UnknownSuite(id.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    jobs.into_par_iter()
        .map(|(id, f)| run_one(id, f, tier, seed))
        .collect()
}

/// CSV of every check: lemma id, parameters, quantity, measured value,
/// reference, tolerance and pass flag.
pub fn measured_constants_csv(reports: &[VerificationReport]) -> Result<Vec<u8>> {
    if reports.iter().all(|r| r.checks.is_empty()) {
        return Err(Error::InvalidParameter("no measured constants to dump".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(["lemma_id", "parameters", "quantity", "measured", "reference", "tolerance", "pass"])
        .map_err(io)?;
    for r in reports {
        for c in &r.checks {
            w.write_record([
                r.lemma_id.as_str(),
                c.parameters.as_str(),
                c.quantity.as_str(),
                &format!("{:e}", c.measured),
                &format!("{:e}", c.reference),
                &format!("{:e}", c.tolerance),
                if c.pass { "true" } else { "false" },
            ])
            .map_err(io)?;
        }
    }
    w.into_inner().map_err(|e| Error::Format(e.to_string()))
}

/// Writes [`measured_constants_csv`] atomically to `path`.
pub fn measured_constants_dump(reports: &[VerificationReport], path: &Path) -> Result<()> {
    let bytes = measured_constants_csv(reports)?;
    crate::lattice::format::atomic_write(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_pass_is_a_pure_comparison() {
        assert!(Check::new("x", "", 1.05, 1.0, 0.1, Comparison::Within).pass);
        assert!(!Check::new("x", "", 1.2, 1.0, 0.1, Comparison::Within).pass);
        assert!(Check::new("x", "", 0.5, 1.0, 0.0, Comparison::AtMost).pass);
        assert!(!Check::new("x", "", 0.5, 1.0, 0.0, Comparison::AtLeast).pass);
        assert!(!Check::new("x", "", f64::NAN, 1.0, 0.0, Comparison::AtMost).pass);
    }

    #[test]
    fn empty_and_unknown_ids() {
        assert!(run_suite(&[], Tier::Small, 1).unwrap().is_empty());
        assert!(matches!(run_suite(&["L9.9"], Tier::Small, 1), Err(Error::UnknownSuite(_))));
        assert!(measured_constants_csv(&[]).is_err());
    }

    #[test]
    fn cheap_suites_pass_and_dump_deterministically() {
        let ids = ["partition", "L4.1", "A.1"];
        let a = run_suite(&ids, Tier::Small, 7).unwrap();
        for r in &a {
            assert!(r.pass, "{} {:?}", r.lemma_id, r.first_failure());
        }
        let b = run_suite(&ids, Tier::Small, 7).unwrap();
        assert_eq!(measured_constants_csv(&a).unwrap(), measured_constants_csv(&b).unwrap());
        let text = String::from_utf8(measured_constants_csv(&a).unwrap()).unwrap();
        assert!(text.starts_with("lemma_id,parameters,quantity"));
    }
}
