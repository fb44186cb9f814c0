//! Acceptance criteria, one check per criterion. Each prints a PASS or FAIL
//! line with its timing and exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dtds::corpus::{extra_rule_instances, formulas, CORPUS_AGENTS};
use dtds::decide::{sat, SatOptions, Verdict};
use dtds::premodel::{random_premodel, xfunc_instance, RandomPremodel};
use dtds::proofkit::{derive_extra_rule, mutate, schemas, substitute, ProofScript};
use dtds::relation::Relation;
use dtds::syntax::{closure, parse, render};
use dtds::transforms::{
    build_choice, check_pmorphism, commutes, filtrate, to_additive, unravel, UnravelOptions,
    DEFAULT_REFINEMENT_BUDGET,
};
use dtds::{Condition, Formula, LassoSystem, Premodel, RelTag, WindowSystem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn f2(s: &str) -> Formula {
    parse(s, 2).unwrap()
}

fn corpus_round_trip() -> Outcome {
    let all = formulas();
    for &s in ["dia [1] X (O1 [1] p & O2 [2] q)", "O2 [2] p", "~O1 [1] ~p"].iter() {
        if !all.contains(&f2(s)) {
            return Err(format!("{s} missing from the corpus"));
        }
    }
    let bad: Vec<String> = all
        .iter()
        .filter(|f| parse(&render(f), CORPUS_AGENTS).ok().as_ref() != Some(*f))
        .map(|f| f.to_string())
        .collect();
    if all.len() < 50 {
        return Err(format!("corpus has only {} formulas", all.len()));
    }
    if bad.is_empty() {
        Ok(format!("{} formulas", all.len()))
    } else {
        Err(format!("round-trip failed for {bad:?}"))
    }
}

fn closure_linear() -> Outcome {
    let mut worst = 0.0f64;
    for f in formulas() {
        let (c, n) = (closure(&f).len(), f.size());
        if c > 4 * n {
            return Err(format!("{f}: closure {c} > 4 * {n}"));
        }
        worst = worst.max(c as f64 / n as f64);
    }
    Ok(format!("max ratio {worst:.2}"))
}

fn choice_lemma() -> Outcome {
    let mut checked = 0;
    for x in 1..=5 {
        for i in 2..=4 {
            let g = build_choice(x, i).map_err(|e| e.to_string())?;
            // Brute force over the whole table, independent of the library's own check.
            for coord in 0..i {
                for fixed in 0..x {
                    let mut hit = vec![false; x];
                    let mut tuple = vec![0; i];
                    loop {
                        if tuple[coord] == fixed {
                            hit[g.apply(&tuple)] = true;
                        }
                        let mut k = 0;
                        while k < i {
                            tuple[k] += 1;
                            if tuple[k] < x {
                                break;
                            }
                            tuple[k] = 0;
                            k += 1;
                        }
                        if k == i {
                            break;
                        }
                    }
                    if hit.contains(&false) {
                        return Err(format!("|X|={x} |I|={i}: slice {coord}={fixed} not onto"));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} slices onto"))
}

/// Some path from `s` of at most `n` states whose last state satisfies
/// `alpha` and whose earlier states satisfy `beta`.
fn until_by_paths(m: &Premodel, s: usize, alpha: &[bool], beta: &[bool]) -> bool {
    fn go(m: &Premodel, s: usize, left: usize, alpha: &[bool], beta: &[bool]) -> bool {
        if alpha[s] {
            return true;
        }
        if left == 0 || !beta[s] {
            return false;
        }
        m.next().successors(s).ones().any(|t| go(m, t, left - 1, alpha, beta))
    }
    go(m, s, m.len() - 1, alpha, beta)
}

fn until_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs = [("p", "q"), ("p & ~q", "dia q"), ("[1] p", "~p | q"), ("O1 q", "true")];
    let mut points = 0;
    for k in 0..200 {
        let n = rng.gen_range(1..=6);
        let mut cfg = RandomPremodel::new(n, 2, &["p", "q"]);
        if k % 2 == 1 {
            cfg = cfg.functional();
        }
        let m = random_premodel(&mut rng, &cfg);
        if !m.audit().is_clean() {
            return Err(format!("premodel {k} is not valid"));
        }
        for (a, b) in pairs {
            let (a, b) = (f2(a), f2(b));
            let ext = |g: &Formula| -> Vec<bool> { (0..n).map(|s| m.eval(s, g).unwrap()).collect() };
            let (av, bv) = (ext(&a), ext(&b));
            let u = Formula::until(a, b);
            for s in 0..n {
                if m.eval(s, &u).unwrap() != until_by_paths(&m, s, &av, &bv) {
                    return Err(format!("premodel {k}, state {s}, {u}"));
                }
                points += 1;
            }
        }
    }
    Ok(format!("{points} state checks"))
}

/// Every schema instance with its metavariables replaced by `p` or `q`.
fn axiom_instances(agents: usize) -> Vec<(String, Formula)> {
    let mut out = Vec::new();
    for s in schemas(agents) {
        let mut vars = Vec::new();
        collect_atoms(&s.pattern, &mut vars);
        for mask in 0..1usize << vars.len() {
            let subst: BTreeMap<String, Formula> = vars
                .iter()
                .enumerate()
                .map(|(k, v)| (v.clone(), Formula::atom(if mask >> k & 1 == 0 { "p" } else { "q" })))
                .collect();
            out.push((s.id.to_string(), substitute(&s.pattern, &subst)));
        }
    }
    out
}

fn collect_atoms(f: &Formula, out: &mut Vec<String>) {
    match f {
        Formula::Atom(a) => {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) | Formula::Nec(g) | Formula::Stit(_, g) | Formula::GroupStit(g) | Formula::Ought(_, g)
        | Formula::Next(g) => collect_atoms(g, out),
        Formula::And(a, b) | Formula::Until(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
    }
}

fn valid_in_window(sys: &LassoSystem, f: &Formula) -> Result<(), (usize, usize)> {
    for h in 0..sys.len() {
        for t in 0..=sys.horizon() {
            if !sys.eval_at(h, t, f).map_err(|_| (h, t))? {
                return Err((h, t));
            }
        }
    }
    Ok(())
}

fn soundness_fuzz() -> Outcome {
    let sigma = closure(&f2("U(p, q) | X p | O1 [1] q | O2 [2] p | [*] X q | dia [1] p"));
    let instances = axiom_instances(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut models, mut tries, mut checks) = (0, 0, 0);
    let opts = UnravelOptions {
        margin: Some(2),
        ..UnravelOptions::with_horizon(2)
    };
    while models < 100 {
        tries += 1;
        if tries > 5000 {
            return Err(format!("only {models} premodels passed the side conditions"));
        }
        let n = rng.gen_range(1..=5);
        let mut cfg = RandomPremodel::new(n, 2, &["p", "q"]);
        if tries % 2 == 0 {
            cfg = cfg.functional();
        }
        let m = random_premodel(&mut rng, &cfg);
        if !m.check_side_conditions(&sigma).unwrap().is_empty() {
            continue;
        }
        models += 1;
        let seeds: Vec<usize> = (0..n).collect();
        let sys = unravel(&m, &sigma, &seeds, opts).map_err(|e| e.to_string())?;
        let report = sys.audit_window();
        if !report.is_clean() {
            return Err(format!("unraveled system fails its audit: {report}"));
        }
        for (id, inst) in &instances {
            if let Err((h, t)) = valid_in_window(&sys, inst) {
                return Err(format!("{id} instance {inst} fails at ({h}, {t})"));
            }
            checks += 1;
        }
    }
    Ok(format!("{models} premodels, {} instances, {checks} window checks", instances.len()))
}

fn xfunc_separation() -> Outcome {
    let m = Premodel::from_json(include_str!("../examples/data/fork.json"), false).map_err(|e| e.to_string())?;
    let inst = xfunc_instance(&parse("p", 1).unwrap());
    let r = m.state("r").unwrap();
    if m.eval(r, &inst).unwrap() {
        return Err(format!("{inst} holds at r"));
    }
    let sigma = closure(&inst);
    let mut systems = 0;
    for seeds in [vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 1, 2, 3, 4]] {
        for horizon in 1..=4 {
            let sys = unravel(&m, &sigma, &seeds, UnravelOptions::with_horizon(horizon)).map_err(|e| e.to_string())?;
            if let Err((h, t)) = valid_in_window(&sys, &inst) {
                return Err(format!("{inst} fails on an unraveled system at ({h}, {t})"));
            }
            systems += 1;
        }
    }
    Ok(format!("fails at r in the premodel, holds on {systems} unraveled systems"))
}

fn filtration_sample() -> Vec<(Premodel, Formula)> {
    let corpus = formulas();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..50)
        .map(|k| {
            let mut cfg = RandomPremodel::new(rng.gen_range(2..=8), 2, &["p", "q", "r", "s", "t"]);
            if k % 3 == 0 {
                cfg = cfg.functional();
            }
            (random_premodel(&mut rng, &cfg), corpus[k % corpus.len()].clone())
        })
        .collect()
}

fn filtration_structure() -> Outcome {
    let mut shrunk = 0;
    for (k, (m, f)) in filtration_sample().iter().enumerate() {
        let out = filtrate(m, &closure(f)).map_err(|e| e.to_string())?;
        let report = out.model.audit();
        if !report.is_clean() {
            return Err(format!("premodel {k} through {f}: {report}"));
        }
        if !out.model.next().is_serial() {
            return Err(format!("premodel {k}: next is not serial"));
        }
        if out.model.len() < m.len() {
            shrunk += 1;
        }
    }
    Ok(format!("50 filtrations clean, {shrunk} strictly smaller"))
}

fn commutation() -> Outcome {
    for (k, (m, f)) in filtration_sample().iter().enumerate() {
        let out = filtrate(m, &closure(f)).map_err(|e| e.to_string())?;
        let sim: Relation = out.classes.to_relation();
        let boxr = m.box_partition().to_relation();
        if !sim.is_equivalence() {
            return Err(format!("premodel {k}: merging relation is not an equivalence"));
        }
        let (left, right) = (sim.then(&boxr), boxr.then(&sim));
        for a in 0..m.len() {
            for b in 0..m.len() {
                if left.contains(a, b) != right.contains(a, b) {
                    return Err(format!("premodel {k}: compositions differ at ({a}, {b})"));
                }
            }
        }
        if !commutes(m, &out.classes) {
            return Err(format!("premodel {k}: library check disagrees with brute force"));
        }
    }
    Ok("50 premodels".into())
}

/// Windows of unraveled random premodels whose group choice strictly
/// refines the intersection of individual choices somewhere.
fn super_additive_windows() -> Vec<WindowSystem> {
    let mut out = vec![WindowSystem::from_json(include_str!("../examples/data/split_grid.json")).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sigma = closure(&f2("p | X q"));
    while out.len() < 10 {
        let mut cfg = RandomPremodel::new(rng.gen_range(3..=5), 2, &["p", "q"]).functional();
        cfg.split_agt = 0.8;
        let m = random_premodel(&mut rng, &cfg);
        let seeds: Vec<usize> = (0..m.len()).collect();
        let Ok(sys) = unravel(&m, &sigma, &seeds, UnravelOptions::with_horizon(1)) else {
            continue;
        };
        let w = sys.window(1);
        if w.len() <= 12 && w.audit(false).is_clean() && w.audit(true).has(Condition::D3) {
            out.push(w);
        }
    }
    out
}

fn additive_conversion() -> Outcome {
    let mut sizes = Vec::new();
    for (k, w) in super_additive_windows().iter().enumerate() {
        let out = to_additive(w, DEFAULT_REFINEMENT_BUDGET).map_err(|e| format!("window {k}: {e}"))?;
        let report = out.system.audit(true);
        if !report.is_clean() {
            return Err(format!("window {k}: {report}"));
        }
        for t in 0..=out.system.horizon() {
            let s = out.system.slice(t);
            let meet = s.stit.iter().skip(1).fold(s.stit[0].clone(), |acc, p| acc.meet(p));
            for a in 0..out.system.len() {
                for b in 0..out.system.len() {
                    if s.agt.same(a, b) != meet.same(a, b) {
                        return Err(format!("window {k}: group choice differs from the meet at t={t}"));
                    }
                }
            }
        }
        let witness = check_pmorphism(&out.system, w, &out.projection).map_err(|e| format!("window {k}: {e}"))?;
        if witness.checked_ops != RelTag::all(w.agents()) || !witness.surjective {
            return Err(format!("window {k}: incomplete p-morphism witness"));
        }
        sizes.push(format!("{}->{}", w.len(), out.system.len()));
    }
    Ok(format!("10 windows, histories {}", sizes.join(" ")))
}

fn end_to_end_sat() -> Outcome {
    let power = f2("dia [1] X (O1 [1] p & O2 [2] q)");
    let r = sat(&power, &SatOptions::new(4, 2)).map_err(|e| e.to_string())?;
    let w = r.witness().ok_or("power formula not satisfied")?;
    if !w.report.verified() {
        return Err(format!("witness does not re-verify: {:?}", w.report));
    }
    for (text, agents) in [("p & ~p", 2), ("O1 p & O1 ~p", 1)] {
        let f = parse(text, agents).unwrap();
        let r = sat(&f, &SatOptions::new(4, agents)).map_err(|e| e.to_string())?;
        match r.verdict {
            Verdict::UnsatUpTo { bound: 4, exhaustive_up_to } if exhaustive_up_to >= 3 => {}
            other => return Err(format!("{text}: unexpected verdict {other:?}")),
        }
    }
    Ok(format!("power SAT on {} states, both contradictions UNSAT up to 4", w.model.len()))
}

fn proofkit() -> Outcome {
    let bundled = ProofScript::parse(include_str!("../examples/data/until_weakening.proof"), 2)
        .map_err(|e| e.to_string())?;
    bundled.check(2).map_err(|e| e.to_string())?;
    if bundled.conclusion() != Some(&f2("U(p, q) -> p | q")) {
        return Err("bundled script proves the wrong formula".into());
    }
    let mut scripts = vec![bundled];
    for inst in extra_rule_instances() {
        let s = derive_extra_rule(&inst.phi, &inst.alpha, &inst.beta, &inst.proof1, &inst.proof2, 2)
            .map_err(|e| e.to_string())?;
        s.check(2).map_err(|e| e.to_string())?;
        scripts.push(s);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut rejected, mut benign) = (0, 0);
    for k in 0..500 {
        let original = &scripts[k % scripts.len()];
        let m = mutate(original, &mut rng);
        if m.script.check(2).is_err() {
            rejected += 1;
        } else if m.is_benign(original) {
            benign += 1;
        } else {
            return Err(format!("accepted mutant changes line {} to {}", m.line, m.script.lines()[m.line - 1].formula));
        }
    }
    if rejected * 100 < 99 * 500 {
        return Err(format!("only {rejected}/500 mutants rejected ({benign} benign)"));
    }
    Ok(format!("6 scripts check, {rejected}/500 mutants rejected, {benign} benign"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 parser round-trip", corpus_round_trip, Duration::from_secs(1)),
        ("2 closure linearity", closure_linear, Duration::from_secs(1)),
        ("3 choice lemma", choice_lemma, Duration::from_secs(5)),
        ("4 until oracle", until_oracle, Duration::from_secs(30)),
        ("5 soundness fuzz", soundness_fuzz, Duration::from_secs(120)),
        ("6 next functionality separation", xfunc_separation, Duration::from_secs(60)),
        ("7 filtration structure", filtration_structure, Duration::from_secs(60)),
        ("8 commutation", commutation, Duration::from_secs(60)),
        ("9 additive conversion", additive_conversion, Duration::from_secs(60)),
        ("10 end-to-end sat", end_to_end_sat, Duration::from_secs(300)),
        ("11 proofkit", proofkit, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > limit => Err(format!("{detail}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} ({took:.2?}): {detail}"),
            Err(why) => {
                println!("FAIL {name} ({took:.2?}): {why}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
