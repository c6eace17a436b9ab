//! Verification suites behind `verify` and `reproduce`. Suites fill a
//! [`ReportDocument`]; items may run in parallel but checks are appended in a
//! fixed order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use av1324::encoder::{audit, encode, MarkingMode};
use av1324::perm::{count_avoiders, count_avoiders_naive, enumerate_avoiders, Pattern, Permutation};
use av1324::roots::{growth_bound_with, GrowthBound, RootOptions};
use av1324::series::{expand, expand_long_division, gf, verify_functional_equations, CheckStatus};
use av1324::wordlang::{
    brute_count_pairs_multi, count_nocb_words, count_segments_nocb, verify_lemma_on_avoiders, ConstraintSet,
    LemmaKind, LEMMA_MAX_N,
};

use crate::report::{big_int, big_uint, Check, ReportDocument};

/// Largest n for which the naive filter is run next to the backtracking count.
pub const NAIVE_MAX_N: usize = 8;
/// Largest n the exhaustive encoder suites accept.
pub const ENCODER_MAX_N: usize = LEMMA_MAX_N;
/// Largest n for the inequality chain in `reproduce`.
pub const CHAIN_MAX_N: usize = 10;
/// Terms of the closed-form series checked against word recurrences.
const SERIES_TERMS: usize = 30;

/// A published bound and the tolerance it is checked to.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Published {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

pub const ALPHA_H: Published = Published {
    name: "alpha_H",
    value: 0.2695867676,
    tolerance: 1e-9,
};

/// `1 / alpha_H` as printed, to seven significant digits.
pub const BETA_H: Published = Published {
    name: "beta_H",
    value: 3.709381,
    tolerance: 1e-6,
};

pub const BOUNDS: [Published; 4] = [
    Published {
        name: "baseline",
        // 7 + 4 sqrt(3)
        value: 13.928203230275509,
        tolerance: 1e-9,
    },
    Published {
        name: "H",
        value: 13.7595074,
        tolerance: 1e-6,
    },
    Published {
        name: "K",
        value: 13.73977,
        tolerance: 1e-4,
    },
    Published {
        name: "T",
        value: 13.73718,
        tolerance: 1e-4,
    },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Injectivity,
    Lemmas,
    Gf,
    Roots,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Injectivity, Suite::Lemmas, Suite::Gf, Suite::Roots],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "injectivity" => Ok(Suite::Injectivity),
            "lemmas" => Ok(Suite::Lemmas),
            "gf" => Ok(Suite::Gf),
            "roots" => Ok(Suite::Roots),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Injectivity => "injectivity",
            Suite::Lemmas => "lemmas",
            Suite::Gf => "gf",
            Suite::Roots => "roots",
            Suite::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub n_max: usize,
    pub mode: MarkingMode,
    pub cap_pairs: usize,
    pub tol_alpha: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n_max: 9,
            mode: MarkingMode::Rule4Prime,
            cap_pairs: 14,
            tol_alpha: RootOptions::default().tol_alpha,
        }
    }
}

impl VerifyConfig {
    pub fn root_options(&self) -> RootOptions {
        RootOptions {
            tol_alpha: self.tol_alpha,
            ..RootOptions::default()
        }
    }
}

pub fn run_suite(doc: &mut ReportDocument, suite: Suite, cfg: &VerifyConfig) {
    for s in suite.expand() {
        let start = Instant::now();
        match s {
            Suite::Injectivity => injectivity(doc, cfg),
            Suite::Lemmas => lemmas(doc, cfg),
            Suite::Gf => gf_suite(doc, cfg),
            Suite::Roots => roots_suite(doc, cfg),
            Suite::All => unreachable!("expanded above"),
        }
        doc.timing(&format!("suite.{s}"), start.elapsed().as_secs_f64());
    }
}

fn avoiders(n: usize) -> Vec<Permutation> {
    if n == 0 {
        return Vec::new();
    }
    enumerate_avoiders(n, &Pattern::p1324()).collect()
}

/// Backtracking vs naive counts, encoder audit and injectivity for every
/// n up to `cfg.n_max`.
pub fn injectivity(doc: &mut ReportDocument, cfg: &VerifyConfig) {
    let q = Pattern::p1324();
    let naive_top = cfg.n_max.min(NAIVE_MAX_N);
    let mismatch = (0..=naive_top).find_map(|n| {
        let fast = count_avoiders(n, &q);
        let naive = count_avoiders_naive(n, &q);
        (fast != naive).then(|| json!({"n": n, "backtracking": big_uint(&fast), "naive": big_uint(&naive)}))
    });
    doc.checks.push(match mismatch {
        None => Check::pass("perm.count.matches_naive", format!("n = 0..{naive_top}")),
        Some(cx) => Check::fail("perm.count.matches_naive", "counts differ", Some(cx)),
    });

    let mut sizes = Vec::new();
    let mut fault: Option<Value> = None;
    let mut collision: Option<Value> = None;
    for n in 1..=cfg.n_max {
        let perms = avoiders(n);
        sizes.push(json!({"n": n, "avoiders": perms.len()}));
        if fault.is_none() {
            fault = perms.par_iter().find_map_first(|p| {
                let f = audit(p, cfg.mode);
                (!f.is_empty()).then(|| json!({"permutation": p.to_string(), "faults": f}))
            });
        }
        if collision.is_none() {
            let mut seen = HashMap::with_capacity(perms.len());
            for p in &perms {
                let pair = encode(p, cfg.mode);
                if let Some(prev) = seen.insert(pair.clone(), p) {
                    collision = Some(json!({"first": prev.to_string(), "second": p.to_string(), "pair": pair}));
                    break;
                }
            }
        }
    }
    let span = format!("every avoider for n = 1..{}, {} mode", cfg.n_max, cfg.mode);
    doc.checks.push(match fault {
        None => Check::pass("encoder.soundness", span.clone()),
        Some(cx) => Check::fail("encoder.soundness", "audit found faults", Some(cx)),
    });
    doc.checks.push(match collision {
        None => Check::pass("encoder.injectivity", format!("distinct images, {span}")),
        Some(cx) => Check::fail("encoder.injectivity", "two avoiders share an image", Some(cx)),
    });
    doc.output("injectivity.avoiders", sizes);
}

/// Conditions (iv) and (vi) on the encoded images of every avoider.
pub fn lemmas(doc: &mut ReportDocument, cfg: &VerifyConfig) {
    let n_max = cfg.n_max.min(LEMMA_MAX_N);
    for (kind, name) in [(LemmaKind::Cab, "lemma.cab"), (LemmaKind::CabK, "lemma.cab_k")] {
        let reports: Vec<_> = (1..=n_max)
            .into_par_iter()
            .map(|n| verify_lemma_on_avoiders(n, kind))
            .collect();
        let mut top = 0;
        let mut check = None;
        for r in reports {
            match r {
                Ok(r) if r.passed() => top = r.checked,
                Ok(r) => {
                    let cx = json!({"n": r.n, "violations": r.violations.len(), "first": r.violations[0]});
                    check = Some(Check::fail(name, format!("violations at n={}", r.n), Some(cx)));
                    break;
                }
                Err(e) => {
                    check = Some(Check::fail(name, e.to_string(), None));
                    break;
                }
            }
        }
        doc.checks.push(
            check.unwrap_or_else(|| Check::pass(name, format!("{top} avoiders checked at n={n_max}"))),
        );
    }
}

fn series(f: &av1324::series::RationalFunction, n: usize) -> Vec<BigInt> {
    expand(f, n).expect("closed forms have integral expansions")
}

/// Closed forms against exhaustive word enumeration and each other.
pub fn gf_suite(doc: &mut ReportDocument, cfg: &VerifyConfig) {
    let cap = cfg.cap_pairs;
    let closed = [gf::h(), gf::k(), gf::t()];
    let sets = [ConstraintSet::H, ConstraintSet::K, ConstraintSet::T];
    let names = ["h", "k", "t"];
    let expanded: Vec<Vec<BigInt>> = closed.iter().map(|f| series(f, cap.max(SERIES_TERMS))).collect();

    let brute: Vec<_> = (2..=cap)
        .into_par_iter()
        .map(|n| (n, brute_count_pairs_multi(n, &sets, cap)))
        .collect();
    let mut rows = Vec::new();
    let mut failure: [Option<Check>; 3] = Default::default();
    for (n, counts) in brute {
        let counts = match counts {
            Ok(c) => c,
            Err(e) => {
                for (i, slot) in failure.iter_mut().enumerate() {
                    slot.get_or_insert_with(|| Check::fail(format!("gf.{}.matches_pairs", names[i]), e.to_string(), None));
                }
                break;
            }
        };
        let mut row = serde_json::Map::new();
        row.insert("n".into(), json!(n));
        for i in 0..3 {
            let brute = BigInt::from(counts[i].clone());
            row.insert(names[i].into(), big_uint(&counts[i]));
            if brute != expanded[i][n] && failure[i].is_none() {
                failure[i] = Some(Check::fail(
                    format!("gf.{}.matches_pairs", names[i]),
                    format!("coefficient {n} differs"),
                    Some(json!({"n": n, "closed_form": big_int(&expanded[i][n]), "brute_force": big_uint(&counts[i])})),
                ));
            }
        }
        rows.push(Value::Object(row));
    }
    for (i, slot) in failure.into_iter().enumerate() {
        doc.checks.push(slot.unwrap_or_else(|| {
            Check::pass(
                format!("gf.{}.matches_pairs", names[i]),
                format!("coefficients match brute force for n = 2..{cap}"),
            )
        }));
    }
    doc.output("gf.pairs", rows);

    let spot: Vec<_> = (2..=4).map(|n| expanded[0][n].clone()).collect();
    doc.checks.push(Check::from_bool(
        "gf.h.spot_values",
        spot == [1, 6, 26].map(BigInt::from),
        format!("h_2..h_4 = {}, {}, {}", spot[0], spot[1], spot[2]),
    ));

    let seg = series(&gf::segments(), SERIES_TERMS);
    let seg_ok = (0..=SERIES_TERMS).all(|n| seg[n] == BigInt::from(count_segments_nocb(n)));
    doc.checks.push(Check::from_bool(
        "gf.segments.matches_recurrence",
        seg_ok,
        format!("first {} coefficients", SERIES_TERMS + 1),
    ));
    let words = series(&gf::nocb_words(), SERIES_TERMS);
    let words_ok = (0..=SERIES_TERMS).all(|n| words[n] == BigInt::from(count_nocb_words(n)));
    doc.checks.push(Check::from_bool(
        "gf.nocb.matches_transfer_matrix",
        words_ok,
        format!("first {} coefficients", SERIES_TERMS + 1),
    ));

    let long_ok = closed.iter().zip(&expanded).all(|(f, e)| {
        expand_long_division(f, cap.max(SERIES_TERMS)).is_ok_and(|l| &l == e)
    });
    doc.checks.push(Check::from_bool(
        "gf.expansion.long_division",
        long_ok,
        "recurrence and long division agree for h, k, t",
    ));
    let ordered = (0..=SERIES_TERMS).all(|n| {
        expanded[0][n] >= expanded[1][n] && expanded[1][n] >= expanded[2][n] && expanded[2][n] >= BigInt::from(0)
    });
    doc.checks.push(Check::from_bool(
        "gf.order.h_ge_k_ge_t",
        ordered,
        format!("h_n >= k_n >= t_n >= 0 for n <= {SERIES_TERMS}"),
    ));

    for c in verify_functional_equations() {
        let name = c.name.clone();
        let cx = serde_json::to_value(&c).ok();
        doc.checks.push(match &c.status {
            CheckStatus::Verified => Check::pass(name, "residual is zero"),
            CheckStatus::Unverifiable { reason } => Check::pass(name, format!("unverifiable as printed: {reason}")),
            CheckStatus::Residual { .. } => Check::fail(name, "nonzero residual", cx),
        });
    }
}

fn bound_for(name: &str, opts: &RootOptions) -> Result<GrowthBound, String> {
    let f = match name {
        "baseline" => gf::nocb_words(),
        "H" => gf::h(),
        "K" => gf::k(),
        "T" => gf::t(),
        other => return Err(format!("no generating function named {other}")),
    };
    growth_bound_with(&f, opts).map_err(|e| e.to_string())
}

/// Certified bounds for every published value, in [`BOUNDS`] order.
pub fn computed_bounds(cfg: &VerifyConfig) -> Vec<(Published, Result<GrowthBound, String>)> {
    let opts = cfg.root_options();
    BOUNDS
        .par_iter()
        .map(|p| (*p, bound_for(p.name, &opts)))
        .collect()
}

fn bound_check(p: &Published, g: &Result<GrowthBound, String>) -> Check {
    let name = format!("roots.{}.bound", p.name.to_ascii_lowercase());
    match g {
        Err(e) => Check::fail(name, e.clone(), None),
        Ok(g) => {
            let diff = (g.bound - p.value).abs();
            let detail = format!("{:.10} vs {} (diff {diff:.1e}, tol {:.0e})", g.bound, p.value, p.tolerance);
            if diff <= p.tolerance && g.alpha.unique_smallest {
                Check::pass(name, detail)
            } else {
                Check::fail(name, detail, serde_json::to_value(g).ok())
            }
        }
    }
}

pub fn roots_suite(doc: &mut ReportDocument, cfg: &VerifyConfig) {
    let bounds = computed_bounds(cfg);
    for (p, g) in &bounds {
        doc.checks.push(bound_check(p, g));
    }
    if let Some((_, Ok(h))) = bounds.iter().find(|(p, _)| p.name == "H") {
        let a = h.alpha.value;
        doc.checks.push(Check::from_bool(
            "roots.h.alpha",
            (a - ALPHA_H.value).abs() <= ALPHA_H.tolerance,
            format!("{a:.12} vs {} (radius {:.1e})", ALPHA_H.value, h.alpha.radius),
        ));
        doc.checks.push(Check::from_bool(
            "roots.h.growth_rate",
            (h.growth_rate - BETA_H.value).abs() <= BETA_H.tolerance,
            format!("1/alpha = {:.9} vs {}", h.growth_rate, BETA_H.value),
        ));
    }
    let ok: Vec<f64> = bounds.iter().filter_map(|(_, g)| g.as_ref().ok().map(|g| g.bound)).collect();
    doc.checks.push(Check::from_bool(
        "roots.order.baseline_gt_h_gt_k_gt_t",
        ok.len() == 4 && ok.windows(2).all(|w| w[0] > w[1]),
        "each added condition lowers the bound",
    ));
    let table: Vec<_> = bounds
        .iter()
        .map(|(p, g)| match g {
            Ok(g) => json!({"name": p.name, "bound": g.bound, "alpha": g.alpha, "bound_radius": g.bound_radius}),
            Err(e) => json!({"name": p.name, "error": e}),
        })
        .collect();
    doc.output("roots.bounds", table);
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainRow {
    pub n: usize,
    pub s: Value,
    pub t: Value,
    pub k: Value,
    pub h: Value,
    pub holds: bool,
}

/// `S_n(1324) <= t_2n <= k_2n <= h_2n` for `n = 1..=n_max`.
pub fn chain(n_max: usize) -> Vec<ChainRow> {
    let [h, k, t] = [gf::h(), gf::k(), gf::t()].map(|f| series(&f, 2 * n_max));
    let s: Vec<_> = (1..=n_max)
        .into_par_iter()
        .map(|n| BigInt::from(count_avoiders(n, &Pattern::p1324())))
        .collect();
    (1..=n_max)
        .map(|n| {
            let m = 2 * n;
            let sn = &s[n - 1];
            ChainRow {
                n,
                s: big_int(sn),
                t: big_int(&t[m]),
                k: big_int(&k[m]),
                h: big_int(&h[m]),
                holds: *sn <= t[m] && t[m] <= k[m] && k[m] <= h[m],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            n_max: 6,
            cap_pairs: 10,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in ["injectivity", "lemmas", "gf", "roots", "all"] {
            assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
        assert_eq!(Suite::All.expand().len(), 4);
    }

    #[test]
    fn small_suites_pass() {
        let mut doc = ReportDocument::new("verify");
        run_suite(&mut doc, Suite::All, &small());
        assert!(doc.passed(), "{}", doc.checks_plain());
        assert!(doc.timings.contains_key("suite.gf"));
    }

    #[test]
    fn check_order_is_canonical() {
        let names = |cfg: &VerifyConfig| {
            let mut doc = ReportDocument::new("verify");
            run_suite(&mut doc, Suite::All, cfg);
            doc.checks.into_iter().map(|c| c.name).collect::<Vec<_>>()
        };
        assert_eq!(names(&small()), names(&small()));
    }

    #[test]
    fn chain_holds_for_small_n() {
        let rows = chain(6);
        assert!(rows.iter().all(|r| r.holds));
        assert_eq!(rows[4].s, json!(103));
    }
}
