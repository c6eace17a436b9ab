use std::time::Instant;

use serde_json::json;

use av1324::encoder::{audit, mark, MarkingMode};
use av1324::perm::{count_avoiders, Pattern, Permutation};
use av1324::roots::{all_roots_with, growth_bound_with};
use av1324::series::{expand, gf, RationalFunction};
use av1324::wordlang::{brute_count_pairs_capped, check_pair, segments, ConstraintSet, Word};

use crate::report::{big_int, big_uint, Check, CsvTable, Format, ReportDocument};
use crate::suites::{self, Suite, VerifyConfig};

/// A finished command: the report plus its plain and CSV renderings.
pub struct Rendered {
    pub doc: ReportDocument,
    pub plain: String,
    pub csv: String,
}

impl Rendered {
    fn new(doc: ReportDocument, plain: String, csv: String) -> Self {
        Rendered { doc, plain, csv }
    }

    /// A report whose only tabular content is its check list.
    fn checks_only(doc: ReportDocument) -> Self {
        let plain = doc.checks_plain();
        let csv = doc.checks_csv();
        Rendered { doc, plain, csv }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Plain => self.plain.clone(),
            Format::Json => self.doc.to_json(),
            Format::Csv => self.csv.clone(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.doc.passed() {
            0
        } else {
            1
        }
    }
}

/// Named generating functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfName {
    Segments,
    Nocb,
    H,
    K,
    T,
}

impl GfName {
    pub const ALL: [GfName; 5] = [GfName::Segments, GfName::Nocb, GfName::H, GfName::K, GfName::T];

    pub fn name(self) -> &'static str {
        match self {
            GfName::Segments => "segments",
            GfName::Nocb => "nocb",
            GfName::H => "h",
            GfName::K => "k",
            GfName::T => "t",
        }
    }

    pub fn function(self) -> RationalFunction {
        match self {
            GfName::Segments => gf::segments(),
            GfName::Nocb => gf::nocb_words(),
            GfName::H => gf::h(),
            GfName::K => gf::k(),
            GfName::T => gf::t(),
        }
    }
}

impl std::str::FromStr for GfName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GfName::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown generating function {s:?}; expected segments, nocb, h, k or t"))
    }
}

pub fn count(pattern: &Pattern, n_max: usize) -> Rendered {
    let mut doc = ReportDocument::new("count");
    doc.input("pattern", pattern.as_permutation().to_string())
        .input("n_max", n_max);
    let start = Instant::now();
    let counts: Vec<_> = (0..=n_max).map(|n| count_avoiders(n, pattern)).collect();
    doc.timing("total", start.elapsed().as_secs_f64());
    let rows: Vec<_> = counts
        .iter()
        .enumerate()
        .map(|(n, c)| json!({"n": n, "count": big_uint(c)}))
        .collect();
    doc.output("rows", rows);
    let plain = counts
        .iter()
        .enumerate()
        .map(|(n, c)| format!("n={n}: {c}"))
        .collect::<Vec<_>>()
        .join("\n");
    let mut csv = CsvTable::new(&["n", "count"]);
    for (n, c) in counts.iter().enumerate() {
        csv.row(vec![n.to_string(), c.to_string()]);
    }
    Rendered::new(doc, plain, csv.finish())
}

pub fn encode(p: &Permutation, mode: MarkingMode) -> Rendered {
    let mut doc = ReportDocument::new("encode");
    doc.input("permutation", p.to_string()).input("mode", mode);
    let m = mark(p, mode);
    let (w, z) = (m.position_word(), m.value_word());
    let colors = m.color_string();
    doc.output("w", &w)
        .output("z", &z)
        .output("colors", &colors)
        .output("marked", &m)
        .output("overrides", m.overrides());
    let plain = format!("w={w} z={z} colors={colors}");
    let mut csv = CsvTable::new(&["permutation", "mode", "w", "z", "colors"]);
    csv.row(vec![p.to_string(), mode.to_string(), w.to_string(), z.to_string(), colors]);
    Rendered::new(doc, plain, csv.finish())
}

pub fn audit_one(p: &Permutation, mode: MarkingMode) -> Rendered {
    let mut doc = ReportDocument::new("audit");
    doc.input("permutation", p.to_string()).input("mode", mode);
    let faults = audit(p, mode);
    doc.checks.push(if faults.is_empty() {
        Check::pass("encoder.audit", "no faults")
    } else {
        Check::fail(
            "encoder.audit",
            format!("{} faults", faults.len()),
            serde_json::to_value(&faults).ok(),
        )
    });
    Rendered::checks_only(doc)
}

pub fn pairs(n: usize, c: ConstraintSet, cap: usize) -> Result<Rendered, String> {
    let mut doc = ReportDocument::new("pairs");
    doc.input("n", n).input("constraints", c.to_string()).input("cap_pairs", cap);
    let start = Instant::now();
    let count = brute_count_pairs_capped(n, c, cap).map_err(|e| e.to_string())?;
    doc.timing("total", start.elapsed().as_secs_f64());
    doc.output("count", big_uint(&count));
    let csv = format!("n,constraints,count\n{n},\"{c}\",{count}");
    Ok(Rendered::new(doc, format!("n={n} constraints={{{c}}}: {count}"), csv))
}

pub fn expand_gf(g: GfName, n_max: usize) -> Rendered {
    let f = g.function();
    let coeffs = expand(&f, n_max).expect("closed forms have integral expansions");
    let mut doc = ReportDocument::new("expand");
    doc.input("gf", g.name()).input("n_max", n_max);
    doc.output("numerator", f.numerator().to_ascending_string())
        .output("denominator", f.denominator().to_ascending_string())
        .output("coefficients", coeffs.iter().map(big_int).collect::<Vec<_>>());
    let plain = coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| format!("n={n}: {c}"))
        .collect::<Vec<_>>()
        .join("\n");
    let mut csv = CsvTable::new(&["n", g.name()]);
    for (n, c) in coeffs.iter().enumerate() {
        csv.row(vec![n.to_string(), c.to_string()]);
    }
    Rendered::new(doc, plain, csv.finish())
}

pub fn roots(g: GfName, cfg: &VerifyConfig) -> Result<Rendered, String> {
    let f = g.function();
    let opts = cfg.root_options();
    let mut doc = ReportDocument::new("roots");
    doc.input("gf", g.name()).input("tol_alpha", cfg.tol_alpha);
    let all = all_roots_with(f.denominator(), &opts).map_err(|e| e.to_string())?;
    let listed: Vec<_> = all
        .iter()
        .map(|z| json!({"re": z.re, "im": z.im, "modulus": z.norm()}))
        .collect();
    doc.output("denominator", f.denominator().to_descending_string())
        .output("roots", listed);
    let mut plain = vec![format!("denominator: {}", f.denominator().to_descending_string())];
    let mut csv = CsvTable::new(&["re", "im", "modulus"]);
    for z in &all {
        plain.push(format!("  {:+.12} {:+.12}i  |z| = {:.12}", z.re, z.im, z.norm()));
        csv.row(vec![z.re.to_string(), z.im.to_string(), z.norm().to_string()]);
    }
    match growth_bound_with(&f, &opts) {
        Ok(b) => {
            plain.push(format!(
                "alpha = {:.12} (radius {:.1e}, unique smallest: {}, gap {:.4})",
                b.alpha.value, b.alpha.radius, b.alpha.unique_smallest, b.alpha.modulus_gap
            ));
            plain.push(format!("bound (1/alpha)^2 = {:.10}", b.bound));
            doc.output("growth_bound", b);
        }
        Err(e) => {
            plain.push(format!("no growth bound: {e}"));
            doc.output("growth_bound_error", e.to_string());
        }
    }
    Ok(Rendered::new(doc, plain.join("\n"), csv.finish()))
}

pub fn segments_of(v: &Word) -> Rendered {
    let segs = segments(v);
    let mut doc = ReportDocument::new("segments");
    doc.input("word", v).output("segments", &segs);
    let plain = segs.iter().map(Word::to_string).collect::<Vec<_>>().join(" | ");
    let mut csv = CsvTable::new(&["index", "segment"]);
    for (i, s) in segs.iter().enumerate() {
        csv.row(vec![(i + 1).to_string(), s.to_string()]);
    }
    Rendered::new(doc, plain, csv.finish())
}

pub fn check_pair_cmd(w: &Word, z: &Word, c: ConstraintSet) -> Rendered {
    let mut doc = ReportDocument::new("check-pair");
    doc.input("w", w).input("z", z).input("constraints", c.to_string());
    let ok = check_pair(w, z, c);
    doc.output("admissible", ok);
    let plain = format!("({w}, {z}) {} under {{{c}}}", if ok { "admissible" } else { "rejected" });
    let csv = format!("w,z,constraints,admissible\n{w},{z},\"{c}\",{ok}");
    Rendered::new(doc, plain, csv)
}

pub fn verify(suite: Suite, cfg: &VerifyConfig) -> Rendered {
    let mut doc = ReportDocument::new("verify");
    doc.input("suite", suite.to_string())
        .input("n_max", cfg.n_max)
        .input("mode", cfg.mode)
        .input("cap_pairs", cfg.cap_pairs)
        .input("tol_alpha", cfg.tol_alpha);
    let start = Instant::now();
    suites::run_suite(&mut doc, suite, cfg);
    doc.timing("total", start.elapsed().as_secs_f64());
    Rendered::checks_only(doc)
}

pub fn reproduce(n_max: usize, cfg: &VerifyConfig) -> Rendered {
    let mut doc = ReportDocument::new("reproduce");
    doc.input("n_max", n_max).input("tol_alpha", cfg.tol_alpha);
    let start = Instant::now();

    let t0 = Instant::now();
    let bounds = suites::computed_bounds(cfg);
    doc.timing("bounds", t0.elapsed().as_secs_f64());
    let mut plain = vec![format!(
        "{:<10} {:<17} {:<19} {:<7} status",
        "bound", "computed", "published", "tol"
    )];
    let mut csv = CsvTable::new(&[
        "table", "row", "computed", "published", "tolerance", "s_n", "t_2n", "k_2n", "h_2n", "passed",
    ]);
    let mut table = Vec::new();
    for (p, g) in &bounds {
        let name = format!("reproduce.bound.{}", p.name.to_ascii_lowercase());
        match g {
            Ok(g) => {
                let ok = (g.bound - p.value).abs() <= p.tolerance && g.alpha.unique_smallest;
                plain.push(format!(
                    "{:<10} {:<17.12} {:<19} {:<7.0e} {}",
                    p.name,
                    g.bound,
                    p.value,
                    p.tolerance,
                    if ok { "PASS" } else { "FAIL" }
                ));
                csv.row(vec![
                    "bounds".into(),
                    p.name.into(),
                    g.bound.to_string(),
                    p.value.to_string(),
                    p.tolerance.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    ok.to_string(),
                ]);
                table.push(json!({"name": p.name, "computed": g.bound, "published": p.value,
                    "tolerance": p.tolerance, "alpha": g.alpha.value}));
                let detail = format!("{:.10} vs {}", g.bound, p.value);
                doc.checks.push(if ok {
                    Check::pass(name, detail)
                } else {
                    Check::fail(name, detail, serde_json::to_value(g).ok())
                });
            }
            Err(e) => {
                plain.push(format!("{:<10} error: {e}", p.name));
                table.push(json!({"name": p.name, "error": e}));
                doc.checks.push(Check::fail(name, e.clone(), None));
            }
        }
    }
    doc.output("bounds", table);

    let t0 = Instant::now();
    let rows = suites::chain(n_max);
    doc.timing("chain", t0.elapsed().as_secs_f64());
    plain.push(String::new());
    plain.push(format!("{:>3} {:>10} {:>14} {:>14} {:>14}", "n", "S_n", "t_2n", "k_2n", "h_2n"));
    for r in &rows {
        plain.push(format!(
            "{:>3} {:>10} {:>14} {:>14} {:>14}{}",
            r.n,
            r.s.to_string(),
            r.t.to_string(),
            r.k.to_string(),
            r.h.to_string(),
            if r.holds { "" } else { "  <- fails" }
        ));
        csv.row(vec![
            "chain".into(),
            r.n.to_string(),
            String::new(),
            String::new(),
            String::new(),
            r.s.to_string(),
            r.t.to_string(),
            r.k.to_string(),
            r.h.to_string(),
            r.holds.to_string(),
        ]);
    }
    let broken = rows.iter().find(|r| !r.holds);
    doc.checks.push(match broken {
        None => Check::pass(
            "reproduce.chain",
            format!("S_n <= t_2n <= k_2n <= h_2n for n = 1..{n_max}"),
        ),
        Some(r) => Check::fail("reproduce.chain", format!("fails at n={}", r.n), serde_json::to_value(r).ok()),
    });
    doc.output("chain", &rows);
    doc.timing("total", start.elapsed().as_secs_f64());

    plain.push(String::new());
    plain.push(doc.checks_plain());
    Rendered::new(doc, plain.join("\n"), csv.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suites::BOUNDS;
    use av1324::perm;

    #[test]
    fn count_rows_include_n_zero() {
        let r = count(&Pattern::p1324(), 4);
        assert_eq!(r.plain.lines().next(), Some("n=0: 1"));
        assert_eq!(r.plain.lines().last(), Some("n=4: 23"));
        assert!(r.csv.starts_with("n,count\n0,1"));
    }

    #[test]
    fn encode_matches_worked_example() {
        let p = perm![3, 6, 1, 2, 7, 4, 5];
        assert!(encode(&p, MarkingMode::Plain).plain.starts_with("w=ABABBCD z=ABACDBB"));
        assert!(encode(&p, MarkingMode::Rule4Prime).plain.starts_with("w=ABABDCD z=ABACDBD"));
    }

    #[test]
    fn gf_names_parse() {
        for g in GfName::ALL {
            assert_eq!(g.name().parse::<GfName>().unwrap(), g);
        }
        assert_eq!("H".parse::<GfName>().unwrap(), GfName::H);
        assert!("q".parse::<GfName>().is_err());
    }

    #[test]
    fn pairs_reports_cap_errors() {
        assert!(pairs(20, ConstraintSet::H, 14).is_err());
        assert!(pairs(4, ConstraintSet::H, 14).unwrap().plain.ends_with(": 26"));
    }

    #[test]
    fn rejected_pair_is_an_answer_not_a_failure() {
        let w: Word = "ACAB".parse().unwrap();
        let z: Word = "AA".parse().unwrap();
        let r = check_pair_cmd(&w, &z, ConstraintSet::H);
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.doc.outputs["admissible"], json!(false));
        assert!(check_pair_cmd(&w, &z, ConstraintSet::BASE).plain.contains("admissible"));
    }

    #[test]
    fn reproduce_small_chain_passes() {
        let r = reproduce(4, &VerifyConfig::default());
        assert!(r.doc.passed(), "{}", r.plain);
        assert_eq!(r.doc.checks.len(), BOUNDS.len() + 1);
        assert!(r.csv.lines().all(|l| l.split(',').count() == 10));
    }
}
