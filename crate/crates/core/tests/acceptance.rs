//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coefring::charspace::{
    enumerate_fn, enumerate_lines, is_echelon, subset_rank_table, Character, GroupContext, Line,
};
use coefring::oracle::Oracle;
use coefring::phi::{build_phi_presentation, closed_form_series, phi_relations, verify_phi};
use coefring::rograde::{
    localized_hilbert, random_arrangement, ro_table, IrrepLabel, MultiDegree, RoGraded,
};
use coefring::ssq::{collapse_check, Page, SpectralSequence};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn ctx(p: u32, n: usize) -> GroupContext {
    GroupContext::new(p, n).unwrap()
}

fn relation_vanishing() -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (p, n) in [(3, 2), (3, 3), (5, 2), (7, 2)] {
        let ctx = ctx(p, n);
        let pres = build_phi_presentation(&ctx, false).unwrap();
        let oracle = Oracle::for_presentation(&pres);
        let rels = phi_relations(&ctx, false);
        let bad = rels
            .iter()
            .filter(|r| !oracle.relation_image(&r.element).is_zero())
            .count();
        ok &= bad == 0;
        notes.push(format!(
            "({p},{n}): {}/{} vanish",
            rels.len() - bad,
            rels.len()
        ));
    }
    if let Err(e) = within(start.elapsed(), Duration::from_secs(10)) {
        ok = false;
        notes.push(e);
    }
    verdict(
        ok,
        format!("{} in {:.2?}", notes.join(", "), start.elapsed()),
    )
}

fn three_way() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (p, n, cutoff) in [(3, 1, 10), (3, 2, 8), (5, 2, 6), (3, 3, 4)] {
        let report = verify_phi(&ctx(p, n), cutoff, false).unwrap();
        ok &= report.passed();
        notes.push(format!("({p},{n}) {:?}", report.oracle.coeffs));
        if !report.passed() {
            notes.push(format!(
                "closed {:?} presentation {:?}",
                report.closed_form.coeffs, report.presentation.coeffs
            ));
        }
    }
    let c32 = closed_form_series(&ctx(3, 2), 3).unwrap().coeffs;
    let c33 = closed_form_series(&ctx(3, 3), 3).unwrap().coeffs;
    ok &= c32 == [1, 4, 7, 10] && c33 == [1, 13, 52, 118];
    if let Err(e) = within(start.elapsed(), Duration::from_secs(300)) {
        ok = false;
        notes.push(e);
    }
    verdict(
        ok,
        format!("{} in {:.2?}", notes.join("; "), start.elapsed()),
    )
}

fn verbatim_mode() -> Verdict {
    let report = verify_phi(&ctx(3, 2), 2, true).unwrap();
    let lib_ok = report.presentation.coeffs[1] == 8
        && report.closed_form.coeffs[1] == 4
        && report.oracle.coeffs[1] == 4
        && !report.passed()
        && report.mismatches.first().map(|m| m.weight) == Some(1);
    let out = Command::new(env!("CARGO_BIN_EXE_coefring"))
        .args([
            "phi-verify",
            "--p",
            "3",
            "--n",
            "2",
            "--verbatim",
            "--cutoff",
            "2",
        ])
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    let cli_ok = out.status.code() == Some(1)
        && stderr.contains("mismatch at weight 1: closed-form 4, presentation 8, oracle 4");
    verdict(
        lib_ok && cli_ok,
        format!(
            "weight 1: presentation {}, closed form {}, oracle {}; exit {:?}; stderr {:?}",
            report.presentation.coeffs[1],
            report.closed_form.coeffs[1],
            report.oracle.coeffs[1],
            out.status.code(),
            stderr.lines().next().unwrap_or("")
        ),
    )
}

fn fn_and_e2() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [3u32, 5] {
        for n in 1..=4usize {
            let ctx = ctx(p, n);
            let family = enumerate_fn(&ctx);
            let expected: u64 = (1..=n as u32).map(|i| 1 + (p as u64).pow(i - 1)).product();
            let all_echelon = family.iter().all(|s| is_echelon(&ctx, s.elems()));
            if family.len() as u64 != expected || !all_echelon {
                ok = false;
                notes.push(format!("({p},{n}): |F| = {} vs {expected}", family.len()));
            }
        }
    }
    let c = ctx(3, 2);
    let recursion: BTreeSet<Vec<Character>> =
        enumerate_fn(&c).iter().map(|s| sorted(s.elems())).collect();
    let chars = c.nonzero_characters();
    let brute: BTreeSet<Vec<Character>> = chars
        .iter()
        .cloned()
        .powerset()
        .filter(|s| is_echelon(&c, s))
        .map(|s| sorted(&s))
        .collect();
    ok &= recursion == brute && brute.len() == 8;
    notes.push(format!("p=3,n=2 brute force {} subsets", brute.len()));
    for (p, n, cutoff) in [(3, 2, 10), (3, 3, 8), (5, 2, 8)] {
        let report = collapse_check(&ctx(p, n), cutoff).unwrap();
        ok &= report.passed();
        let ss = SpectralSequence::new(&ctx(p, n), cutoff);
        let (e1, e2) = (ss.table(Page::E1, cutoff), ss.table(Page::E2, cutoff));
        let entrywise = (0..=cutoff).all(|s| (0..=cutoff).all(|d| e2.get(s, d) <= e1.get(s, d)));
        ok &= entrywise;
        notes.push(format!("({p},{n}) E2 totals {:?}", report.e2_total.coeffs));
    }
    if let Err(e) = within(start.elapsed(), Duration::from_secs(10)) {
        ok = false;
        notes.push(e);
    }
    verdict(ok, notes.join("; "))
}

fn sorted(s: &[Character]) -> Vec<Character> {
    let mut v = s.to_vec();
    v.sort_by(|a, b| a.coords().cmp(b.coords()));
    v
}

fn subset_ranks() -> Verdict {
    let c = ctx(3, 2);
    let chars = c.nonzero_characters();
    let table = subset_rank_table(&c, chars.len());
    let mut brute = vec![vec![0u64; 3]; chars.len() + 1];
    for s in chars.iter().powerset() {
        brute[s.len()][c.rank(s.iter().copied())] += 1;
    }
    let ok = (0..=chars.len()).all(|s| (0..=2).all(|r| table[s][r] == BigUint::from(brute[s][r])));
    verdict(ok, format!("c(s,r) for s = 0..=8: {brute:?}"))
}

fn label(c: &GroupContext, coords: &[u32]) -> IrrepLabel {
    IrrepLabel::new(c, &c.character(coords).unwrap()).unwrap()
}

fn ro_spots() -> Verdict {
    let start = Instant::now();
    let c32 = ctx(3, 2);
    let (a, b) = (label(&c32, &[1, 0]), label(&c32, &[0, 1]));
    let ro = RoGraded::new(&c32);
    let d1 = ro.dimension(&MultiDegree::new([(a.clone(), 1)].into(), 2));
    let d2 = ro.dimension(&MultiDegree::new([(a.clone(), 1), (b, 1)].into(), 3));
    let c51 = ctx(5, 1);
    let (x, y) = (label(&c51, &[1]), label(&c51, &[2]));
    let d3 = RoGraded::new(&c51).dimension(&MultiDegree::new([(x, 1), (y, 1)].into(), 2));
    let alpha = c32.character(&[1, 0]).unwrap();
    let row: Vec<u64> = ro_table(&c32, 2, 0..=4)
        .into_iter()
        .filter(|r| r.multidegree == [(alpha.clone(), 2)])
        .map(|r| r.dim)
        .collect();
    let ok = (d1, d2, d3) == (1, 2, 0)
        && row == [0, 0, 0, 1, 1]
        && start.elapsed() <= Duration::from_secs(10);
    verdict(
        ok,
        format!(
            "dims {d1}, {d2}, {d3}; m={{(1,0):2}} k=0..4 {row:?} in {:.2?}",
            start.elapsed()
        ),
    )
}

fn localization() -> Verdict {
    let start = Instant::now();
    let c = ctx(3, 3);
    let cutoff = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let arrangements: Vec<Vec<Line>> = (0..20)
        .map(|_| {
            let size = rng.gen_range(1..=4);
            random_arrangement(&c, size, &mut rng)
        })
        .collect();
    let reports: Vec<_> = arrangements
        .iter()
        .map(|s| localized_hilbert(&c, s, cutoff).unwrap())
        .collect();
    let bounded = reports.iter().all(|r| r.oracle_le_presentation);
    let equal = reports.iter().filter(|r| r.all_equal()).count();
    let unequal: Vec<String> = reports
        .iter()
        .filter(|r| !r.all_equal())
        .map(|r| format!("{{{}}}", r.lines.iter().join(" ")))
        .unique()
        .collect();

    let lines = enumerate_lines(&c);
    let single = localized_hilbert(&c, &lines[..1], cutoff).unwrap();
    let pair = localized_hilbert(&c, &lines[..2], cutoff).unwrap();
    let hand = single.all_equal()
        && single.oracle.coeffs == [1; 6]
        && pair.all_equal()
        && pair.oracle.coeffs == [1, 2, 3, 4, 5, 6];
    let ok = bounded && hand && start.elapsed() <= Duration::from_secs(600);
    verdict(
        ok,
        format!(
            "oracle <= presentation for all 20: {bounded}; equal flags {equal}/20 (unequal: {}); hand cases exact: {hand}; {:.2?}",
            if unequal.is_empty() { "none".to_string() } else { unequal.join(", ") },
            start.elapsed()
        ),
    )
}

fn determinism() -> Verdict {
    let jobs: &[&[&str]] = &[
        &["lines", "--p", "3", "--n", "3"],
        &["fn-enum", "--p", "3", "--n", "3", "--format", "json"],
        &["phi-verify", "--p", "3", "--n", "2", "--cutoff", "6"],
        &[
            "phi-verify",
            "--p",
            "3",
            "--n",
            "2",
            "--verbatim",
            "--cutoff",
            "2",
            "--format",
            "json",
        ],
        &["phi-basis", "--p", "3", "--n", "3", "--cutoff", "3"],
        &["series", "--p", "5", "--n", "3", "--cutoff", "8"],
        &["e1-table", "--p", "3", "--n", "3", "--cutoff", "8"],
        &[
            "e2-table", "--p", "5", "--n", "2", "--cutoff", "8", "--format", "json",
        ],
        &["collapse-check", "--p", "3", "--n", "3", "--cutoff", "8"],
        &[
            "ro-dim", "--p", "3", "--n", "2", "--irrep", "1,0:1", "--irrep", "0,1:1", "--k", "3",
        ],
        &["ro-table", "--p", "3", "--n", "2", "--max-mult", "2"],
        &[
            "localize", "--p", "3", "--n", "3", "--random", "6", "--seed", "5", "--cutoff", "4",
        ],
        &[
            "relation-check",
            "--p",
            "3",
            "--n",
            "3",
            "--samples",
            "100",
            "--seed",
            "9",
        ],
    ];
    let mut bad = Vec::new();
    for args in jobs {
        let runs: Vec<_> = [("1", 0), ("1", 1), ("4", 0), ("4", 1)]
            .iter()
            .map(|(threads, _)| {
                let out = Command::new(env!("CARGO_BIN_EXE_coefring"))
                    .args(*args)
                    .env("COEFRING_THREADS", threads)
                    .output()
                    .unwrap();
                (out.stdout, out.stderr, out.status.code())
            })
            .collect();
        if runs.iter().any(|r| *r != runs[0]) || runs[0].0.is_empty() {
            bad.push(args[0]);
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{} commands x 2 runs x threads {{1,4}}; differing: {bad:?}",
            jobs.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("relation vanishing", relation_vanishing),
        ("three-way Hilbert agreement", three_way),
        ("verbatim-mode discrepancy", verbatim_mode),
        ("F_n and E2 identities", fn_and_e2),
        ("subset-rank counts", subset_ranks),
        ("RO(G)+ spot dimensions", ro_spots),
        ("localization suite", localization),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.ok {
            failures += 1;
        }
        println!(
            "{} [{}] {name}: {}",
            if v.ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
