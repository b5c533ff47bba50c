//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gcl_core::arith::{is_prime, ord_p_int, rat, rat_int};
use gcl_core::bernoulli::{b_pm3_harmonic_route, b_pm3_mod_p, BernoulliTable};
use gcl_core::lemmas::{
    binom_shift_with_weights, block_lemma_with_coefficient, granville_with_coefficient, LemmaGrid, LemmaId,
    LemmaTask, SHIFT_SAMPLES,
};
use gcl_core::search::{run_search, table_rows_in, Classification, SearchBox, DEFAULT_BUDGET};
use gcl_core::sequences::{cross_validate, term_by_recurrence, NamedId, Recurrence, SequenceSpec, DEFAULT_MAX_INDEX};
use gcl_core::theorem::{
    consistency_sweep, default_tasks, verify_gauss3, verify_theorem1, CongruenceTask, ConsistencyStatus,
    Mode, DEFAULT_MS, DEFAULT_NS, DEFAULT_PRIMES, DEFAULT_RST,
};
use gcl_core::{reduce_mod, PrimePowerModulus, Valuation};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sequence_fidelity() -> Outcome {
    let mut specs: Vec<SequenceSpec> = NamedId::ALL.into_iter().map(SequenceSpec::Named).collect();
    for id in NamedId::ALL {
        if let Some((r, s, t)) = id.oss_triple() {
            specs.push(SequenceSpec::oss(r, s, t).map_err(|e| e.to_string())?);
        }
    }
    let bad: Vec<String> = specs
        .par_iter()
        .filter_map(|spec| match cross_validate(spec, 31) {
            Ok(rep) if rep.agrees() => None,
            Ok(rep) => Some(format!("{spec}: {rep:?}")),
            Err(e) => Some(format!("{spec}: {e}")),
        })
        .collect();
    ensure(bad.is_empty(), || bad.join("; "))?;
    let a1 = term_by_recurrence(&SequenceSpec::Rec(Recurrence::APERY_ZETA3), 1).map_err(|e| e.to_string())?;
    let b1 = term_by_recurrence(&SequenceSpec::Rec(Recurrence::APERY_ZETA2), 1).map_err(|e| e.to_string())?;
    ensure(a1 == rat(5, 1) && b1 == rat(3, 1), || format!("a_1 = {a1}, b_1 = {b1}"))?;
    Ok(format!("{} specs: recurrence = closed form, integral for n <= 30; a_1 = 5, b_1 = 3", specs.len()))
}

fn task(p: u64, n: u64, m: u32, (r, s, t): (u32, u32, u32)) -> CongruenceTask {
    CongruenceTask { p, n, m, r, s, t, mode: Mode::Theorem1 }
}

fn grid_failures(mode: Mode) -> Result<Vec<String>, String> {
    let tasks = default_tasks(mode);
    let results: Vec<_> = tasks.par_iter().map(|t| (t, t.run(DEFAULT_MAX_INDEX))).collect();
    let mut failures = Vec::new();
    for (t, r) in results {
        match r {
            Ok(rep) if rep.pass => {}
            Ok(rep) => failures.push(format!("{t:?} achieved {}", rep.achieved_exponent)),
            Err(e) => failures.push(format!("{t:?}: {e}")),
        }
    }
    Ok(failures)
}

fn gauss_order_three() -> Outcome {
    let failures = grid_failures(Mode::Gauss3)?;
    ensure(failures.is_empty(), || failures.join("; "))?;
    let apery = verify_gauss3(&task(5, 1, 1, (2, 2, 0)), DEFAULT_MAX_INDEX).map_err(|e| e.to_string())?;
    ensure(apery.difference().to_string() == "819000", || format!("a_5 - a_1 = {}", apery.difference()))?;
    ensure(apery.achieved_exponent == Valuation::Finite(3), || format!("ord_5 = {}", apery.achieved_exponent))?;
    let coster = verify_gauss3(&task(5, 1, 2, (2, 2, 0)), DEFAULT_MAX_INDEX).map_err(|e| e.to_string())?;
    ensure(coster.pass, || "Coster m = 2 case fails".into())?;
    Ok(format!("{} tasks pass; ord_5(819000) = 3", default_tasks(Mode::Gauss3).len()))
}

fn theorem_one() -> Outcome {
    let failures = grid_failures(Mode::Theorem1)?;
    ensure(failures.is_empty(), || failures.join("; "))?;
    let p4 = PrimePowerModulus::new(5, 4).map_err(|e| e.to_string())?;
    let anchors = [((2, 2, 0), 250, rat(-14, 3)), ((3, 0, 0), 375, rat(1, 2)), ((2, 1, 0), 0, rat(-5, 3)), ((4, 0, 0), 0, rat(0, 1))];
    for (rst, residue, correction) in anchors {
        let rep = verify_theorem1(&task(5, 1, 1, rst), DEFAULT_MAX_INDEX).map_err(|e| e.to_string())?;
        ensure(rep.pass, || format!("{rst:?} fails"))?;
        ensure(rep.correction.as_ref() == Some(&correction), || format!("{rst:?}: 𝒜 = {:?}", rep.correction))?;
        let diff = reduce_mod(&rat_int(rep.difference()), &p4).map_err(|e| e.to_string())?;
        let shifted = reduce_mod(&(rat(125, 1) * rat(1, 6) * &correction), &p4).map_err(|e| e.to_string())?;
        ensure(diff.value().to_string() == residue.to_string() && diff == shifted, || {
            format!("{rst:?}: difference ≡ {} and correction ≡ {} mod 625", diff.value(), shifted.value())
        })?;
    }
    let s10 = verify_gauss3(&task(5, 1, 1, (4, 0, 0)), DEFAULT_MAX_INDEX).map_err(|e| e.to_string())?;
    ensure(s10.difference().to_string() == "21250" && ord_p_int(&s10.difference(), 5).at_least(4), || {
        "5^4 does not divide u_5 - u_1 for s10".into()
    })?;
    Ok(format!("{} tasks reach 3m+1; four p = 5 anchors match mod 625", default_tasks(Mode::Theorem1).len()))
}

fn consistency() -> Outcome {
    let rows: Vec<(u64, (u32, u32, u32))> = DEFAULT_NS.iter().flat_map(|&n| DEFAULT_RST.iter().map(move |&rst| (n, rst))).collect();
    let reports: Vec<_> = rows
        .par_iter()
        .map(|&(n, (r, s, t))| consistency_sweep(n, r, s, t, &DEFAULT_PRIMES, &DEFAULT_MS, DEFAULT_MAX_INDEX))
        .collect();
    let mut entries = 0;
    for rep in reports {
        let rep = rep.map_err(|e| e.to_string())?;
        for e in &rep.entries {
            entries += 1;
            ensure(e.status == ConsistencyStatus::Agree, || {
                format!("n = {}, rst = {:?}, p = {}, m = {}: {:?}", rep.n, rep.rst, e.p, e.m, e.status)
            })?;
        }
    }
    Ok(format!("{entries} (n, rst, p, m) points recover 𝒜_n mod p exactly"))
}

fn lemma_suite() -> Outcome {
    let grid = LemmaGrid::default();
    let tasks = grid.all_tasks();
    let shift_count = tasks.iter().filter(|t| matches!(t, LemmaTask::Shift(_))).count();
    ensure(shift_count == grid.primes.len() * grid.ms.len() * SHIFT_SAMPLES, || format!("{shift_count} shift samples"))?;
    let results: Vec<_> = tasks.par_iter().map(|t| (t, t.run())).collect();
    let mut failing: Vec<String> = Vec::new();
    let mut failing_off_level_zero = 0;
    for (t, r) in &results {
        match r {
            Ok(rep) if rep.pass => {}
            Ok(rep) => {
                if rep.param("l") != Some(0) {
                    failing_off_level_zero += 1;
                }
                failing.push(format!("{} {:?} achieved {}", t.lemma(), rep.params, rep.achieved_exponent));
            }
            Err(e) => {
                failing_off_level_zero += 1;
                failing.push(format!("{t:?}: {e}"));
            }
        }
    }

    let mut vacuous = Vec::new();
    for which in LemmaId::ALL.into_iter().filter(LemmaId::is_block) {
        let caught = grid.tasks(which).iter().any(|t| {
            let LemmaTask::Block { p, index, n, .. } = *t else { return false };
            let wrong = which.coefficient(n).expect("block lemma") + rat(1, 3);
            matches!(block_lemma_with_coefficient(which, p, index, n, &wrong), Ok(r) if !r.pass)
        });
        if !caught {
            vacuous.push(which.short().to_string());
        }
    }
    let granville_caught = grid.tasks(LemmaId::GranvilleB1).iter().any(|t| {
        let LemmaTask::Granville { n, k, p } = *t else { return false };
        matches!(granville_with_coefficient(n, k, p, &rat(2, 3)), Ok(r) if !r.pass)
    });
    if !granville_caught {
        vacuous.push("b1".into());
    }
    let shift_caught = grid.tasks(LemmaId::ShiftB2).iter().any(|t| {
        let LemmaTask::Shift(a) = t else { return false };
        matches!(binom_shift_with_weights(a, [a.r as i64, a.s as i64, a.t as i64]), Ok(r) if !r.pass)
    });
    if !shift_caught {
        vacuous.push("b2".into());
    }
    ensure(vacuous.is_empty(), || format!("perturbed coefficients not rejected by {}", vacuous.join(", ")))?;

    if !failing.is_empty() {
        let mut by_lemma: Vec<(String, usize)> = Vec::new();
        for f in &failing {
            let id = f.split(' ').next().unwrap_or("").to_string();
            match by_lemma.iter_mut().find(|(l, _)| *l == id) {
                Some((_, c)) => *c += 1,
                None => by_lemma.push((id, 1)),
            }
        }
        let counts: Vec<String> = by_lemma.iter().map(|(l, c)| format!("{l}: {c}")).collect();
        return Err(format!(
            "{} of {} grid points fail ({}), {} of them away from l = 0; first: {}; negative controls rejected by all twelve verifiers",
            failing.len(),
            tasks.len(),
            counts.join(", "),
            failing_off_level_zero,
            failing[0]
        ));
    }
    Ok(format!("{} grid points pass ({shift_count} random b2 instances); negative controls rejected", tasks.len()))
}

fn bernoulli() -> Outcome {
    let mut table = BernoulliTable::new(60);
    table.extend_to(60).map_err(|e| e.to_string())?;
    table.check_invariants()?;
    let primes: Vec<u64> = (5..500).filter(|&p| is_prime(p)).collect();
    for &p in &primes {
        let r = b_pm3_mod_p(p).map_err(|e| e.to_string())?;
        let h = b_pm3_harmonic_route(p).map_err(|e| e.to_string())?;
        ensure(r.residue.value().to_string() == h.to_string(), || format!("p = {p}: routes disagree"))?;
    }
    Ok(format!("B_0..B_60 satisfy von Staudt-Clausen; both B_(p-3) routes agree for {} primes below 500", primes.len()))
}

fn search() -> Outcome {
    let mut detail = Vec::new();
    for (b, expected) in [(SearchBox::default_zagier(), 6), (SearchBox::default_cooper(), 9)] {
        let hits = run_search(&b, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        let mut known: Vec<(NamedId, Vec<i64>)> = hits
            .iter()
            .filter_map(|h| match h.classification {
                Classification::KnownSporadic(id) => Some((id, h.params.clone())),
                _ => None,
            })
            .collect();
        known.sort();
        let mut table = table_rows_in(&b);
        table.sort();
        ensure(table.len() == expected, || format!("{} table rows in the {} box", table.len(), b.family()))?;
        let missed: Vec<_> = table.iter().filter(|row| !known.contains(row)).collect();
        ensure(missed.is_empty(), || format!("{} box misses {missed:?}", b.family()))?;
        if expected == 6 {
            ensure(known == table, || format!("zagier KnownSporadic hits {known:?}"))?;
        }
        detail.push(format!("{}: {} integral tuples, {} known", b.family(), hits.len(), known.len()));
    }
    Ok(detail.join("; "))
}

fn default_suite(workers: &str) -> Vec<u8> {
    let commands: [&[&str]; 7] = [
        &["seq", "--spec", "named:gamma", "--count", "31"],
        &["verify-lemma"],
        &["verify-gauss"],
        &["verify-theorem1"],
        &["consistency"],
        &["search", "--family", "zagier"],
        &["search", "--family", "cooper"],
    ];
    let mut stream = Vec::new();
    for args in commands {
        let argv = ["gcl", "--workers", workers].into_iter().chain(args.iter().copied());
        let mut err = Vec::new();
        gcl_cli::run(argv, &mut stream, &mut err);
        stream.extend_from_slice(&err);
    }
    stream
}

fn determinism() -> Outcome {
    let one = default_suite("1");
    let four = default_suite("4");
    ensure(!one.is_empty(), || "empty report stream".into())?;
    ensure(one == four, || {
        let at = one.iter().zip(&four).position(|(a, b)| a != b).unwrap_or(one.len().min(four.len()));
        format!("streams differ at byte {at}")
    })?;
    Ok(format!("{} bytes, {} records identical at 1 and 4 workers", one.len(), one.iter().filter(|&&b| b == b'\n').count()))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "sequence fidelity", Duration::from_secs(10), sequence_fidelity),
        (2, "Gauss order-3 congruence", Duration::from_secs(600), gauss_order_three),
        (3, "Theorem 1 modulo p^(3m+1)", Duration::from_secs(900), theorem_one),
        (4, "correction independent of m and p", Duration::from_secs(900), consistency),
        (5, "lemma suite", Duration::from_secs(120), lemma_suite),
        (6, "Bernoulli numbers", Duration::from_secs(30), bernoulli),
        (7, "integrality search", Duration::from_secs(1200), search),
        (8, "determinism across worker counts", Duration::from_secs(1800), determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{id}] {name} ({elapsed:.2?}): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{id}] {name} ({elapsed:.2?}): {reason}");
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

