//! The embedded example suite: named cases, golden values with their source, digests.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::complexes::{cone, ChainComplex, ChainMap};
use crate::dalg::{
    circle_comparison, crystallization_gr_compare, free_crystalline_stub, gr_consistency, graded_free_table,
    hochschild_stub, hodge_graded_pieces, infinitesimal_stub, kahler, pd_envelope_stub, qrsp_truncated_check,
    derham_stub, AlgebraPresentation, TableFlavor, Theory,
};
use crate::dold_kan::{derived_power, lsym_total, PowerKind};
use crate::error::{Error, Result};
use crate::graded::FilteredStub;
use crate::linalg::{Matrix, RingSpec};

/// Golden values shipped with the binary.
pub const GOLDEN: &str = include_str!("golden.json");

type CaseFn = fn() -> Result<String>;

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub name: String,
    /// Where the expected value comes from: `quoted`, `computed` or `immediate`.
    pub source: String,
    pub pass: bool,
    pub computed: String,
    pub expected: Option<String>,
    pub digest: String,
    pub millis: u128,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(|c| c.pass)
    }

    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.pass).count()
    }

    /// Runtimes are left out so the JSON is identical across runs.
    pub fn to_json(&self) -> Value {
        let cases: Vec<Value> = self
            .cases
            .iter()
            .map(|c| {
                let mut v = json!({
                    "name": c.name,
                    "source": c.source,
                    "pass": c.pass,
                    "computed": c.computed,
                    "sha256": c.digest,
                });
                if !c.pass {
                    v["expected"] = json!(c.expected);
                }
                v
            })
            .collect();
        json!({"total": self.cases.len(), "passed": self.passed(), "all_pass": self.all_pass(), "cases": cases})
    }
}

fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs every case against the golden JSON `{"cases": {name: {"source": …, "expected": …}}}`.
pub fn paper_suite(golden: &str) -> Result<SuiteReport> {
    let g: Value = serde_json::from_str(golden)?;
    let table = g["cases"].as_object().ok_or_else(|| Error::Parse("golden file needs a \"cases\" object".into()))?;
    let mut cases: Vec<CaseResult> = CASES
        .par_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let computed = match f() {
                Ok(v) => v,
                Err(e) => format!("error: {e}"),
            };
            let millis = start.elapsed().as_millis();
            let entry = table.get(*name);
            let expected = entry.and_then(|e| e["expected"].as_str()).map(str::to_string);
            let source = entry.and_then(|e| e["source"].as_str()).unwrap_or("missing").to_string();
            CaseResult {
                name: name.to_string(),
                source,
                pass: expected.as_deref() == Some(computed.as_str()),
                digest: sha256_hex(&computed),
                computed,
                expected,
                millis,
            }
        })
        .collect();
    for (name, e) in table {
        if !CASES.iter().any(|(n, _)| n == name) {
            cases.push(CaseResult {
                name: name.clone(),
                source: e["source"].as_str().unwrap_or("missing").to_string(),
                pass: false,
                computed: "no such case".into(),
                expected: e["expected"].as_str().map(str::to_string),
                digest: sha256_hex(""),
                millis: 0,
            });
        }
    }
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(SuiteReport { cases })
}

const CASES: &[(&str, CaseFn)] = &[
    ("lsym-Z0", || lsym_case(0, RingSpec::Integers)),
    ("lsym-Z1", || lsym_case(1, RingSpec::Integers)),
    ("lsym-Z2", || lsym_case(2, RingSpec::Integers)),
    ("lsym-F2-1", || lsym_case(1, RingSpec::fp(2)?)),
    ("lsym-F3-2", || lsym_case(2, RingSpec::fp(3)?)),
    ("power-sym2-Z2", || power_case(PowerKind::Sym, 2, 2)),
    ("power-antisym2-Z0", || power_case(PowerKind::AntiSym, 2, 0)),
    ("power-ext2-Z1", || power_case(PowerKind::Exterior, 2, 1)),
    ("goerss-F2-2", goerss_case),
    ("tensor-koszul-2-3", tensor_case),
    ("cone-times-2", cone_case),
    ("kahler-hypersurface-x2", || Ok(kahler(&AlgebraPresentation::preset("hypersurface-x2", 3)?)?.to_string())),
    ("inf-Fp-over-Z-p3-N4", || stub_gr(&infinitesimal_stub(&preset("Fp-over-Z", 3)?, 4, None)?)),
    ("inf-Fp-over-Z-p5-N4", || stub_gr(&infinitesimal_stub(&preset("Fp-over-Z", 5)?, 4, None)?)),
    ("derham-Fp-over-Z-p3-N4", || stub_gr(&derham_stub(&preset("Fp-over-Z", 3)?, 4, None)?)),
    ("derham-Zx-level0", derham_zx_case),
    ("pd-oracle-Fp-over-Z-p2-N4", pd_oracle_case),
    ("hodge-inf-Fp-over-Z-p3", || hodge_case(Theory::Infinitesimal)),
    ("hodge-derham-Fp-over-Z-p3", || hodge_case(Theory::DeRham)),
    ("hh-Zx-N3", || hh_case("Zx")),
    ("hh-Zxy-N3", || hh_case("Zxy")),
    ("hh-hypersurface-x2-N3", || stub_gr(&hochschild_stub(&preset("hypersurface-x2", 3)?, 3, None)?)),
    ("gr-consistency", gr_consistency_case),
    ("circle-N4", circle_case),
    ("graded-table-B0", || table_case(TableFlavor::B(0), -1)),
    ("graded-table-B0-strict", || table_case(TableFlavor::BStrict(0), -1)),
    ("graded-table-N0", || table_case(TableFlavor::N(0), 0)),
    ("crys-stub-i1-Z-N2", || stub_gr(&free_crystalline_stub(RingSpec::Integers, 1, 1, 2)?)),
    ("crys-stub-i1-Z2-N1", || stub_gr(&free_crystalline_stub(RingSpec::Integers, 1, 2, 1)?)),
    ("crystallization-F2", || crystallization_case("Fp-over-Z", 2, 5)),
    ("crystallization-F3", || crystallization_case("Fp-over-Z", 3, 5)),
    ("crystallization-F5", || crystallization_case("Fp-over-Z", 5, 6)),
    ("crystallization-Q", crystallization_q_case),
    ("qrsp-p2-L1-N2", || qrsp_case(2, 1, 2)),
    ("qrsp-p3-L0-N2", || qrsp_case(3, 0, 2)),
];

fn preset(name: &str, p: u64) -> Result<AlgebraPresentation> {
    AlgebraPresentation::preset(name, p)
}

fn lsym_case(degree: i32, ring: RingSpec) -> Result<String> {
    let g = lsym_total(&ChainComplex::concentrated(ring, degree, 1), 4, 10)?;
    Ok(g.homology().iter().map(|(w, h)| format!("w{w}: {h}")).collect::<Vec<_>>().join("; "))
}

fn power_case(kind: PowerKind, r: usize, degree: i32) -> Result<String> {
    Ok(derived_power(kind, r, &ChainComplex::concentrated(RingSpec::Integers, degree, 1), 10)?.homology().to_string())
}

fn goerss_case() -> Result<String> {
    let f2 = RingSpec::fp(2)?;
    let one = ChainComplex::concentrated(f2, 1, 1);
    let mut parts = Vec::new();
    for r in 2..=4 {
        parts.push(format!("LSym^{r}(F2[1]): {}", derived_power(PowerKind::Sym, r, &one, 12)?.homology()));
    }
    let g = lsym_total(&ChainComplex::concentrated(f2, 2, 1), 4, 8)?;
    let mut ranks = BTreeMap::new();
    for h in g.homology().values() {
        for (d, m) in h.groups() {
            if *d <= 8 {
                *ranks.entry(*d).or_insert(0usize) += m.free_rank();
            }
        }
    }
    parts.push(format!("LSym(F2[2]) ranks: {ranks:?}"));
    Ok(parts.join("; "))
}

fn koszul(n: i64) -> ChainComplex {
    ChainComplex::two_term(Matrix::from_i64(RingSpec::Integers, &[&[n]]), 1)
}

fn tensor_case() -> Result<String> {
    Ok(koszul(2).tensor(&koszul(3))?.homology().to_string())
}

fn cone_case() -> Result<String> {
    let z = ChainComplex::concentrated(RingSpec::Integers, 0, 1);
    let f = ChainMap::new(z.clone(), z, [(0, Matrix::from_i64(RingSpec::Integers, &[&[2]]))].into())?;
    Ok(cone(&f)?.homology().to_string())
}

fn stub_gr(stub: &FilteredStub) -> Result<String> {
    Ok(stub.gr_homology()?.iter().map(|(s, h)| format!("gr{s}: {h}")).collect::<Vec<_>>().join("; "))
}

fn derham_zx_case() -> Result<String> {
    let st = derham_stub(&preset("Zx", 3)?, 2, Some(4))?;
    Ok(format!("F0: {}; {}", st.level(0).homology(), stub_gr(&st)?))
}

fn pd_oracle_case() -> Result<String> {
    let (oracle, stub) = pd_envelope_stub(&preset("Fp-over-Z", 2)?, 4, None)?;
    let gr = stub.gr_homology()?;
    let rows: Vec<String> = (0..4)
        .map(|s| Ok(format!("gr{s}: oracle {} model {}", oracle.gr(s)?, gr[&(s as i32)])))
        .collect::<Result<_>>()?;
    Ok(rows.join("; "))
}

fn hodge_case(theory: Theory) -> Result<String> {
    let p = preset("Fp-over-Z", 3)?;
    let rows: Vec<String> = (0..4)
        .map(|s| Ok(format!("gr{s}: {}", hodge_graded_pieces(&p, theory, s, 10, None)?.homology())))
        .collect::<Result<_>>()?;
    Ok(rows.join("; "))
}

fn hh_case(name: &str) -> Result<String> {
    let st = hochschild_stub(&preset(name, 3)?, 3, Some(3))?;
    let conn: Vec<String> =
        (0..3).map(|s| format!("F{s} lo {:?}", st.level(s).homology().lo())).collect();
    Ok(format!("{}; {}", stub_gr(&st)?, conn.join(", ")))
}

fn gr_consistency_case() -> Result<String> {
    let mut rows = Vec::new();
    for (name, theory) in [
        ("Fp-over-Z", Theory::Infinitesimal),
        ("Fp-over-Z", Theory::DeRham),
        ("Fp-over-Z", Theory::Hochschild),
        ("Zx", Theory::DeRham),
        ("Zx", Theory::Hochschild),
        ("Zxy", Theory::Hochschild),
        ("hypersurface-x2", Theory::DeRham),
        ("hypersurface-x2", Theory::Hochschild),
    ] {
        let bound = if name == "Fp-over-Z" { None } else { Some(3) };
        let ok = gr_consistency(&preset(name, 3)?, theory, 3, bound)?.iter().all(|c| c.agrees());
        rows.push(format!("{name}/{}: {}", theory.as_str(), if ok { "agree" } else { "differ" }));
    }
    Ok(rows.join("; "))
}

fn circle_case() -> Result<String> {
    let c = circle_comparison(4)?;
    let gr: Vec<String> = c.gr.iter().map(|(s, h)| format!("gr{s}: {h}")).collect();
    Ok(format!("total: {}; {}; dual-shear agrees: {}", c.total, gr.join("; "), c.agrees()))
}

fn table_case(flavor: TableFlavor, degree: i32) -> Result<String> {
    let g = graded_free_table(flavor, &ChainComplex::concentrated(RingSpec::Integers, degree, 1), 1, 3, 10)?;
    Ok(g.homology().iter().map(|(w, h)| format!("w{w}: {h}")).collect::<Vec<_>>().join("; "))
}

fn crystallization_case(name: &str, p: u64, top: usize) -> Result<String> {
    let pres = preset(name, p)?;
    let rows: Vec<String> = (0..=top)
        .map(|s| {
            let r = crystallization_gr_compare(&pres, s, None)?;
            let kind = if r.is_iso { "iso" } else if r.is_zero { "zero" } else { "other" };
            Ok(format!("s{s}: {kind}"))
        })
        .collect::<Result<_>>()?;
    Ok(rows.join(", "))
}

fn crystallization_q_case() -> Result<String> {
    let pres = AlgebraPresentation::parse_parts("Q", &["x"], &["x^2"], "regseq")?;
    let rows: Vec<String> = (0..=6)
        .map(|s| {
            let r = crystallization_gr_compare(&pres, s, None)?;
            Ok(format!("s{s}: {}", if r.is_iso { "iso" } else { "not iso" }))
        })
        .collect::<Result<_>>()?;
    Ok(rows.join(", "))
}

fn qrsp_case(p: u64, level: u32, n: usize) -> Result<String> {
    let r = qrsp_truncated_check(p, level, n)?;
    let ranks: Vec<String> = r.dims.iter().map(|d| format!("{}", d / r.ring_dim)).collect();
    Ok(format!("ranks over R_L: ({}); passes: {}", ranks.join(","), r.passes()))
}
