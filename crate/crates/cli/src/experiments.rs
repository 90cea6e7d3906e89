//! One runner per experiment. Trials run as independent tasks with streams
//! derived from `(seed, task)` and are reported in task order.

use rayon::prelude::*;
use serde_json::json;

use sofic_core::empirical::{enumerate_microstates, search_microstate, Labeling, NeighborhoodSpec, WindowDistribution};
use sofic_core::exact::Scale;
use sofic_core::freegroup::ball;
use sofic_core::homology::{
    bernoulli_contract_path, betti0_two_scale, build_complex, contractibility_check, covering_bound, diffuse_contract_path, homology_rank,
    ContractReport, Paths,
};
use sofic_core::indepsets::{
    closed_band, cluster_of, enumerate_indep, good_set_filter, max_indep, overlap_spectrum, planted_inequality_check, sample_planted,
    shatter_components,
};
use sofic_core::moments::{
    exact_expected_count_indep, f_pair, f_pair_closed, f_single, log_expected_count_indep, mc_expected_count, rational_to_f64,
};
use sofic_core::partition::{balance_multi, balance_single, max_mean_deviation, max_part_weight, multi_bound, AtomFunction, WeightedSpace};
use sofic_core::rng::{self, Rng};
use sofic_core::sofic::{count_short_cycles, product_parts, product_with_trivial, sample_config_graph, sample_perm_hom, schreier_graph, sofic_report, PermHom};
use sofic_core::Error;

use crate::config::*;
use crate::output::{flag, int, num, opt, Table};
use crate::CliError;

pub struct Outcome {
    pub tables: Vec<Table>,
    pub results: serde_json::Value,
    /// False when an enumeration budget cut the work short.
    pub complete: bool,
}

impl Outcome {
    fn complete(tables: Vec<Table>, results: serde_json::Value) -> Self {
        Outcome { tables, results, complete: true }
    }
}

pub fn run(exp: &Experiment, seed: u64) -> Result<Outcome, CliError> {
    match exp {
        Experiment::SampleGraph(p) => sample_graph(p, seed),
        Experiment::SoficCheck(p) => sofic_check(p, seed),
        Experiment::Moments(p) => moments(p, seed),
        Experiment::IndepEnumerate(p) => indep_enumerate(p, seed),
        Experiment::Planted(p) => planted(p, seed),
        Experiment::Cluster(p) => cluster(p, seed),
        Experiment::Shatter(p) => shatter(p, seed),
        Experiment::Homology(p) => homology(p, seed),
        Experiment::BernoulliContract(p) => bernoulli(p, seed),
        Experiment::DiffuseContract(p) => diffuse(p, seed),
        Experiment::PartitionBalance(p) => partition(p, seed),
    }
}

fn tasks<T: Send>(count: usize, seed: u64, f: impl Fn(&mut Rng, usize) -> Result<T, Error> + Sync) -> Result<Vec<T>, CliError> {
    let out: Result<Vec<T>, Error> = (0..count).into_par_iter().map(|i| f(&mut rng::derive(seed, i as u64), i)).collect();
    Ok(out?)
}

fn sample_graph(p: &SampleGraph, seed: u64) -> Result<Outcome, CliError> {
    let graphs = tasks(p.count, seed, |rng, _| match p.model {
        GraphModel::Perm => Ok(schreier_graph(&sample_perm_hom(p.r, p.n, rng))),
        GraphModel::Config => sample_config_graph(p.d, p.n, rng),
    })?;
    let mut edges = Table::new("edges", &["graph", "u", "v"]);
    let mut cycles = Table::new("cycles", &["graph", "length", "count"]);
    let mut summary = Table::new("graphs", &["graph", "n", "degree", "components", "self_loop_vertices"]);
    for (i, g) in graphs.iter().enumerate() {
        for (u, v) in g.edges() {
            edges.push(vec![int(i), int(u), int(v)]);
        }
        for (k, c) in count_short_cycles(g, p.max_cycle).into_iter().enumerate() {
            cycles.push(vec![int(i), int(k + 1), int(c)]);
        }
        let loops = (0..g.n()).filter(|&v| g.has_self_loop(v)).count();
        summary.push(vec![int(i), int(g.n()), int(g.d()), int(g.component_count()), int(loops)]);
    }
    let results = json!({ "graphs": graphs.len() });
    Ok(Outcome::complete(vec![summary, edges, cycles], results))
}

fn sofic_check(p: &SoficCheck, seed: u64) -> Result<Outcome, CliError> {
    let window = ball(p.r, p.radius);
    let reports = tasks(p.trials, seed, |rng, _| {
        let sigma = sample_perm_hom(p.r, p.n, rng);
        let mut out = vec![("sigma", sofic_report(&sigma, &window, p.delta))];
        if let Some(m) = p.trivial_copies {
            out.push(("product", sofic_report(&product_with_trivial(&sigma, m)?, &window, p.delta)));
        }
        Ok(out)
    })?;
    let mut words = Table::new("fixed_fractions", &["trial", "action", "word", "fixed_fraction"]);
    let mut trials = Table::new("trials", &["trial", "action", "free_count", "trace_preserving", "multiplicative"]);
    let mut passing = 0;
    for (t, list) in reports.iter().enumerate() {
        for (action, rep) in list {
            for (w, f) in &rep.fixed_fractions {
                words.push(vec![int(t), action.to_string(), w.to_string(), num(*f)]);
            }
            trials.push(vec![int(t), action.to_string(), int(rep.free_count), flag(rep.is_trace_preserving), flag(rep.is_multiplicative)]);
            passing += usize::from(*action == "sigma" && rep.is_trace_preserving);
        }
    }
    Ok(Outcome::complete(vec![trials, words], json!({ "trace_preserving_trials": passing, "trials": p.trials })))
}

fn moments(p: &Moments, seed: u64) -> Result<Outcome, CliError> {
    let mut t = Table::new("moments", &["r", "n_or_inf", "s", "s'", "t", "method", "value", "residual"]);
    let single = f_single(p.r, p.s)?;
    t.push(vec![int(p.r), "inf".into(), num(p.s), String::new(), String::new(), "single".into(), num(single), num(0.0)]);
    if let Some(overlap) = p.t {
        let s2 = p.s2.unwrap_or(p.s);
        let pair = f_pair(p.r, p.s, s2, overlap)?;
        t.push(vec![int(p.r), "inf".into(), num(p.s), num(s2), num(overlap), "pair-max".into(), num(pair.value), num(pair.residual)]);
        if s2 == p.s {
            let closed = f_pair_closed(p.r, p.s, overlap)?;
            t.push(vec![int(p.r), "inf".into(), num(p.s), num(s2), num(overlap), "pair-closed".into(), num(closed.value), num(closed.residual)]);
        }
    }
    for &n in &p.ns {
        let w = Scale::from_f64(p.s)?.floor_times(n) as usize;
        let v = log_expected_count_indep(p.r, n, w) / n as f64;
        t.push(vec![int(p.r), int(n), num(p.s), String::new(), String::new(), "exact-log".into(), num(v), num(0.0)]);
    }
    let mut results = json!({ "f_single": single });
    if let Some(mc) = &p.monte_carlo {
        let exact = rational_to_f64(&exact_expected_count_indep(p.r, mc.n, mc.w));
        let est = mc_expected_count(p.r, mc.n, mc.w, mc.samples, seed)?;
        let dens = mc.w as f64 / mc.n as f64;
        t.push(vec![int(p.r), int(mc.n), num(dens), String::new(), String::new(), "exact-count".into(), num(exact), num(0.0)]);
        t.push(vec![int(p.r), int(mc.n), num(dens), String::new(), String::new(), "mc-count".into(), num(est.estimate), num(est.stderr)]);
        results["monte_carlo"] = json!({ "exact": exact, "estimate": est.estimate, "stderr": est.stderr, "samples": est.samples });
    }
    Ok(Outcome::complete(vec![t], results))
}

fn indep_enumerate(p: &IndepEnumerate, seed: u64) -> Result<Outcome, CliError> {
    let g = schreier_graph(&sample_perm_hom(p.r, p.n, &mut rng::derive(seed, 0)));
    let e = enumerate_indep(&g, p.w_min, p.w_max, p.budget);
    let mut by_size = vec![0u64; p.w_max + 1];
    for s in &e.sets {
        by_size[s.len()] += 1;
    }
    let mut counts = Table::new("counts", &["size", "count"]);
    for w in p.w_min..=p.w_max {
        counts.push(vec![int(w), int(by_size[w])]);
    }
    let mut tables = vec![counts];
    if p.write_sets {
        let mut sets = Table::new("sets", &["index", "size", "members"]);
        for (i, s) in e.sets.iter().enumerate() {
            let members: Vec<String> = s.iter().map(int).collect();
            sets.push(vec![int(i), int(s.len()), members.join(" ")]);
        }
        tables.push(sets);
    }
    let m = max_indep(&g);
    let results = json!({ "sets": e.sets.len(), "complete": e.complete, "max_indep": m.size, "max_indep_fraction": m.fraction() });
    Ok(Outcome { tables, results, complete: e.complete })
}

fn planted(p: &Planted, seed: u64) -> Result<Outcome, CliError> {
    let check = planted_inequality_check(p.r, p.big_r, p.n, p.w, p.samples, seed)?;
    let mut t = Table::new("events", &["vertex", "p_unif", "se_unif", "p_plant", "se_plant", "bound", "holds"]);
    for e in &check.events {
        t.push(vec![int(e.vertex), num(e.p_unif), num(e.se_unif), num(e.p_plant), num(e.se_plant), num(e.bound), flag(e.holds)]);
    }
    let results = json!({
        "e_r": check.e_r,
        "e_big_r": check.e_big_r,
        "threshold": check.threshold,
        "p_x": check.p_x.estimate,
        "p_x_stderr": check.p_x.stderr,
        "all_hold": check.events.iter().all(|e| e.holds),
    });
    Ok(Outcome::complete(vec![t], results))
}

fn cluster(p: &Cluster, seed: u64) -> Result<Outcome, CliError> {
    let w = Scale::from_f64(p.s)?.floor_times(p.n).max(1) as usize;
    let reports = tasks(p.trials, seed, |rng, _| {
        let (sigma, set) = sample_planted(p.r, p.n, w, rng)?;
        let g = schreier_graph(&sigma);
        let cl = cluster_of(&g, &set, p.s, p.eps, 0, p.budget)?;
        let good = p.good_set.as_ref().map(|gp| good_set_filter(&g, &set, gp, p.budget)).transpose()?;
        Ok((cl, good))
    })?;
    let mut t = Table::new("clusters", &["trial", "w", "count", "log_size_per_vertex", "complete", "good_set", "gap_ok", "cluster_ok"]);
    let mut complete = true;
    for (i, (cl, good)) in reports.iter().enumerate() {
        complete &= cl.complete && good.as_ref().is_none_or(|g| g.complete);
        t.push(vec![
            int(i),
            int(w),
            int(cl.count),
            num(cl.log_size_per_vertex),
            flag(cl.complete),
            opt(good.as_ref().map(|g| g.passes)),
            opt(good.as_ref().map(|g| g.gap_ok)),
            opt(good.as_ref().map(|g| g.cluster_ok)),
        ]);
    }
    Ok(Outcome { tables: vec![t], results: json!({ "trials": p.trials, "w": w }), complete })
}

fn shatter(p: &Shatter, seed: u64) -> Result<Outcome, CliError> {
    let g = schreier_graph(&sample_perm_hom(p.r, p.n, &mut rng::derive(seed, 0)));
    let (lo, hi) = closed_band(p.n, Scale::from_f64(p.s)?, Scale::from_f64(p.eps)?);
    let mut comps = Table::new("components", &["kappa", "sets", "components"]);
    let mut spectrum = Table::new("spectrum", &["intersection_size", "count"]);
    if lo > hi {
        return Ok(Outcome::complete(vec![comps, spectrum], json!({ "band": null, "sets": 0 })));
    }
    let e = enumerate_indep(&g, lo, hi, p.budget);
    for &k in &p.kappas {
        let c = if e.sets.is_empty() { 0 } else { shatter_components(&e.sets, k)?.count };
        comps.push(vec![num(k), int(e.sets.len()), int(c)]);
    }
    let mut complete = e.complete;
    if let Some(w) = e.sets.first() {
        let sp = overlap_spectrum(&g, w, lo, hi, p.budget);
        complete &= sp.complete;
        for (i, c) in sp.counts.iter().enumerate() {
            spectrum.push(vec![int(i), int(c)]);
        }
    }
    let results = json!({ "band": [lo, hi], "sets": e.sets.len(), "complete": complete });
    Ok(Outcome { tables: vec![comps, spectrum], results, complete })
}

fn spec(r: usize, radius: usize, marginal: &[f64], tv: f64) -> Result<NeighborhoodSpec, Error> {
    NeighborhoodSpec::new(WindowDistribution::product(ball(r, radius), marginal)?, tv)
}

fn homology(p: &Homology, seed: u64) -> Result<Outcome, CliError> {
    let sigma = sample_perm_hom(p.r, p.n, &mut rng::derive(seed, 0));
    let o1 = spec(p.r, p.window_radius, &p.o1.marginal, p.o1.radius)?;
    let o2 = spec(p.r, p.window_radius, &p.o2.marginal, p.o2.radius)?;
    let e1 = enumerate_microstates(&sigma, &o1, p.budget)?;
    let e2 = enumerate_microstates(&sigma, &o2, p.budget)?;
    let mut t = Table::new("homology", &["d", "dim", "cover", "cover_bound", "bound_applies"]);
    let complete = e1.complete && e2.complete;
    if complete {
        let cx = build_complex(&e1.labelings, &e2.labelings, p.kappa1, p.kappa2, p.d_max)?;
        for d in 0..=p.d_max {
            let dim = if d == 0 { betti0_two_scale(&cx).rank } else { homology_rank(&cx, d, p.l)?.dim };
            let cb = covering_bound(&cx, d);
            t.push(vec![int(d), int(dim), int(cb.cover), cb.bound.to_string(), flag(cb.applicable)]);
        }
    }
    let results = json!({ "omega1": e1.labelings.len(), "omega2": e2.labelings.len(), "complete": complete });
    Ok(Outcome { tables: vec![t], results, complete })
}

fn contract_table(name: &'static str, reports: &[ContractReport]) -> (Table, serde_json::Value) {
    let mut t = Table::new(name, &["trial", "c1_membership", "c2_start", "c3_nonexpanding", "c4_small_steps", "c5_merge", "membership_rate", "merge_step"]);
    let mut holds = [0usize; 5];
    for (i, r) in reports.iter().enumerate() {
        let mut row = vec![int(i)];
        for (c, h) in r.conditions.iter().zip(holds.iter_mut()) {
            row.push(flag(*c));
            *h += usize::from(*c);
        }
        row.push(num(r.membership_rate));
        row.push(opt(r.merge_step));
        t.push(row);
    }
    (t, json!({ "trials": reports.len(), "condition_holds": holds }))
}

fn microstates(sigma: &PermHom, o1: &NeighborhoodSpec, k: usize, flips: usize, rng: &mut Rng) -> Result<Vec<Labeling>, Error> {
    (0..k)
        .map(|_| {
            search_microstate(sigma, o1, rng, flips)?
                .ok_or_else(|| Error::BudgetExceeded { budget: flips })
        })
        .collect()
}

fn bernoulli(p: &Contract, seed: u64) -> Result<Outcome, CliError> {
    let o1 = spec(p.r, p.window_radius, &p.marginal, p.o1_radius)?;
    let o2 = spec(p.r, p.window_radius, &p.marginal, p.o2_radius)?;
    let reports = tasks(p.trials, seed, |rng, _| {
        let sigma = sample_perm_hom(p.r, p.n, rng);
        let xs = microstates(&sigma, &o1, p.microstates, p.search_flips, rng)?;
        let paths = bernoulli_contract_path(&xs, p.steps, &p.marginal, rng)?;
        contractibility_check(&xs, &paths, &sigma, &o2, p.delta)
    })?;
    let (t, results) = contract_table("contract", &reports);
    Ok(Outcome::complete(vec![t], results))
}

fn diffuse(p: &Diffuse, seed: u64) -> Result<Outcome, CliError> {
    let o1 = spec(p.r, p.window_radius, &p.marginal, p.o1_radius)?;
    let o2 = spec(p.r, p.window_radius, &p.marginal, p.o2_radius)?;
    let parts = product_parts(p.n, p.copies);
    let reports = tasks(p.trials, seed, |rng, _| {
        let sigma = product_with_trivial(&sample_perm_hom(p.r, p.n, rng), p.copies)?;
        let mut xs = microstates(&sigma, &o1, p.microstates + 1, p.search_flips, rng)?;
        let x_ref = xs.pop().expect("at least one microstate");
        let paths: Paths = diffuse_contract_path(&parts, &xs, &x_ref, None)?;
        contractibility_check(&xs, &paths, &sigma, &o2, p.delta)
    })?;
    let (t, mut results) = contract_table("contract", &reports);
    results["max_part_fraction"] = json!(1.0 / p.copies as f64);
    Ok(Outcome::complete(vec![t], results))
}

fn partition(p: &PartitionBalance, seed: u64) -> Result<Outcome, CliError> {
    let space = WeightedSpace::uniform(p.atoms)?;
    let rows = tasks(p.trials, seed, |rng, _| {
        let fs: Vec<AtomFunction> = (0..p.functions)
            .map(|_| {
                let nums: Vec<u64> = (0..p.atoms).map(|_| rng::below(rng, p.scale as usize + 1) as u64).collect();
                AtomFunction::from_values(&space, &nums, p.scale)
            })
            .collect::<Result<_, _>>()?;
        let part = if p.functions == 1 { balance_single(&space, &fs[0], p.delta, p.eps)? } else { balance_multi(&space, &fs, p.delta, p.eps)? };
        let weight = max_part_weight(&space, &part);
        let dev = fs.iter().map(|f| max_mean_deviation(&space, f, &part)).max().expect("functions >= 1");
        Ok((part.len(), weight, dev))
    })?;
    // 100ε/δ for one function is the m = 1 case
    let bound = multi_bound(p.delta, p.eps, p.functions)?;
    let mut t = Table::new("partitions", &["trial", "parts", "max_part_weight", "weight_bound", "max_mean_deviation", "delta"]);
    for (i, (len, w, d)) in rows.iter().enumerate() {
        t.push(vec![int(i), int(len), w.to_string(), bound.to_string(), d.to_string(), num(p.delta)]);
    }
    Ok(Outcome::complete(vec![t], json!({ "trials": p.trials, "weight_bound": bound.to_string() })))
}
