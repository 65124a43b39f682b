//! One runner per experiment kind. Runners only compute; [`crate::output`]
//! writes.

use congrowth::census::{envelope_check, primitive_ratio_curve, ConjugacyCensus};
use congrowth::complex::{
    acylindricity_probe, complex_from_table, kernel_bound_probe, loxodromic_test,
    smallest_connecting_k, window_stability, window_table,
};
use congrowth::enumeration::{build_census, growth_exponent, scc_estimate, sphere_counts};
use congrowth::geometry::{
    bounded_intersection_audit, build_admissible_witness, contraction_audit,
    fractional_barrier_census, linear_drift_census, mutate_witness, validate_admissible,
    AdmissibleParams, AxisSet, BarrierSpec, DriftSpec, FractionCensus, Mutation,
};
use congrowth::series::{series_report, SeriesKind, SeriesOptions};
use congrowth::{Element, GroupModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Experiment, Resolved};
use crate::output::{Artifacts, Table};
use crate::CliError;

type Run = Result<Artifacts, CliError>;

fn word(model: &GroupModel, w: &Option<String>) -> Element {
    // Words were parsed once during validation.
    w.as_deref()
        .map(|s| model.parse(s).expect("validated word"))
        .unwrap_or_else(|| model.identity())
}

fn get<T: Copy>(v: Option<T>) -> T {
    v.expect("resolved parameter")
}

fn rng(run: &Resolved) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(get(run.config.seed))
}

pub fn run(run: &Resolved) -> Run {
    match run.experiment {
        Experiment::ModelInfo => model_info(run),
        Experiment::CensusBalls => census_balls(run),
        Experiment::CensusConjugacy => census_conjugacy(run),
        Experiment::CensusBarriers => census_barriers(run),
        Experiment::CensusFractional => census_fractional(run),
        Experiment::CensusDrift => census_drift(run),
        Experiment::AuditContraction => audit_contraction(run),
        Experiment::Admissible => admissible(run),
        Experiment::ComplexBuild => complex_build(run),
        Experiment::ComplexLoxodromic => complex_loxodromic(run),
        Experiment::ComplexAcyl => complex_acyl(run),
        Experiment::Series => series(run),
        Experiment::SccEstimate => scc(run),
    }
}

fn model_info(run: &Resolved) -> Run {
    let m = &run.model;
    let spheres = sphere_counts(m, get(run.config.max_radius), &run.plan)?;
    let mut element = serde_json::Value::Null;
    if run.config.g.is_some() {
        let g = word(m, &run.config.g);
        let rec = m.conjugacy_canonical(&g);
        let mut info = json!({
            "normal_form": m.format(&g),
            "length": g.len(),
            "stable_length": rec.tau,
            "pointed_length": rec.pointed_length,
            "class_kind": format!("{:?}", rec.kind).to_lowercase(),
            "canonical_rep": m.format(&rec.canonical_rep),
            "primitive": rec.is_primitive,
            "root": m.format(&rec.root),
            "exponent": rec.exponent,
        });
        if !g.is_empty() && !m.is_torsion(&g) {
            let e = m.elementary_subgroup(&g, get(run.config.search_radius), &run.plan)?;
            info["elementary_subgroup"] = json!({
                "root_generator": m.format(&e.root_generator),
                "kernel": e.kernel_elements.iter().map(|k| m.format(k)).collect::<Vec<_>>(),
                "orientation_index": e.orientation_index,
                "flip": e.flip.as_ref().map(|f| m.format(f)),
                "search_radius": e.search_radius,
            });
        }
        element = info;
    }
    let summary = format!(
        "{}: {} letters; spheres {:?}",
        m.display_name(),
        m.alphabet_len(),
        spheres
    );
    let results = json!({
        "name": m.display_name(),
        "kind": m.kind(),
        "alphabet": m.alphabet().map(|x| m.format_word(&[x])).collect::<Vec<_>>(),
        "sphere_counts": spheres,
        "element": element,
    });
    Artifacts::new(&results, summary)
}

fn census_balls(run: &Resolved) -> Run {
    let c = build_census(
        &run.model,
        get(run.config.max_radius),
        get(run.config.annulus_width),
        &run.plan,
    )?;
    let fit = growth_exponent(&c).ok();
    let mut t = Table::new(&["n", "sphere", "ball", "annulus"]);
    for (i, n) in c.radii.iter().enumerate() {
        t.push([
            *n as u64,
            c.sphere_counts[i],
            c.ball_counts[i],
            c.annulus_counts[i],
        ]);
    }
    let summary = match &fit {
        Some(f) => format!(
            "ball({}) = {}; delta_hat = {:.6}",
            c.max_radius(),
            c.ball_counts.last().unwrap_or(&0),
            f.delta_hat
        ),
        None => format!(
            "ball({}) = {}",
            c.max_radius(),
            c.ball_counts.last().unwrap_or(&0)
        ),
    };
    Ok(Artifacts::new(&json!({ "census": c, "growth": fit }), summary)?.with_table(t))
}

fn census_conjugacy(run: &Resolved) -> Run {
    let max = get(run.config.max_radius);
    let census = ConjugacyCensus::build_with_index_cap(&run.model, max, 0, &run.plan)?;
    let delta = match run.config.delta_hat {
        Some(d) => d,
        None => growth_exponent(&build_census(&run.model, max.max(3), 0, &run.plan)?)?.delta_hat,
    };
    let (lo, hi) = (get(run.config.fit_lo), get(run.config.fit_hi));
    let envelopes = envelope_check(&census, delta, lo, hi)?;
    let ratio = primitive_ratio_curve(&census);
    let mut t = Table::new(&[
        "n",
        "pointed",
        "stable_capped",
        "primitive_pointed",
        "primitive_stable_capped",
        "envelope_pointed",
        "envelope_primitive",
        "classes",
        "primitive",
    ]);
    for n in 0..=max {
        t.push([
            n.to_string(),
            census.counts_pointed[n].to_string(),
            census.counts_stable_capped[n].to_string(),
            census.primitive_pointed[n].to_string(),
            census.primitive_stable_capped[n].to_string(),
            envelopes.pointed.values[n].to_string(),
            envelopes.primitive_pointed.values[n].to_string(),
            census.classes_exact[n].to_string(),
            census.primitive_exact[n].to_string(),
        ]);
    }
    let summary = format!(
        "#C(o,{max}) = {}, #C'(o,{max}) = {}; primitive envelope ratio {:.4} on [{lo}, {hi}]",
        census.counts_pointed[max],
        census.primitive_pointed[max],
        envelopes.primitive_pointed.ratio
    );
    let results = json!({
        "delta_hat": delta,
        "census": census,
        "envelopes": envelopes,
        "primitive_ratio": ratio,
    });
    Ok(Artifacts::new(&results, summary)?.with_table(t))
}

/// The fitted rate is repeated on every row so each row stands alone.
fn fraction_table(c: &FractionCensus, rate: Option<f64>) -> Table {
    let rate = rate.map_or(String::new(), |r| r.to_string());
    let mut t = Table::new(&["n", "satisfied", "total", "fraction", "fitted_rate"]);
    for n in 0..c.totals.len() {
        t.push([
            n.to_string(),
            c.satisfied[n].to_string(),
            c.totals[n].to_string(),
            c.fractions[n].to_string(),
            rate.clone(),
        ]);
    }
    t
}

fn fraction_run(run: &Resolved, c: FractionCensus, what: &str) -> Run {
    let (lo, hi) = (get(run.config.fit_lo), get(run.config.fit_hi));
    let decay = c.decay(lo, hi).ok();
    let rate = decay.as_ref().map(|f| f.slope.exp());
    let summary = format!(
        "{what} fraction at n = {}: {:.6}; decay rate {}",
        hi,
        c.fractions[hi],
        rate.map_or("n/a".into(), |r| format!("{r:.4}"))
    );
    let results = json!({
        "census": c,
        "decay_fit": decay,
        "decay_rate": rate,
        "nonincreasing": c.nonincreasing(lo, hi),
    });
    Ok(Artifacts::new(&results, summary)?.with_table(fraction_table(&c, rate)))
}

fn barrier_spec(run: &Resolved) -> Result<BarrierSpec, CliError> {
    let f = word(&run.model, &run.config.f);
    Ok(BarrierSpec::new(&run.model, get(run.config.epsilon), &f)?
        .with_slack(run.config.slack.unwrap_or(0))
        .with_proper(run.config.proper.unwrap_or(false)))
}

fn census_barriers(run: &Resolved) -> Run {
    let spec = barrier_spec(run)?;
    let c = congrowth::geometry::barrier_free_census(
        &run.model,
        &spec,
        get(run.config.max_radius),
        &run.plan,
    )?;
    fraction_run(run, c, "barrier-free")
}

fn census_fractional(run: &Resolved) -> Run {
    let spec = barrier_spec(run)?;
    let c = fractional_barrier_census(
        &run.model,
        &spec,
        get(run.config.theta),
        get(run.config.min_len),
        get(run.config.max_radius),
        &run.plan,
    )?;
    fraction_run(run, c, "fractionally barrier-free")
}

fn census_drift(run: &Resolved) -> Run {
    let f = word(&run.model, &run.config.f);
    let spec = DriftSpec::new(
        &run.model,
        &f,
        get(run.config.power),
        get(run.config.epsilon),
        get(run.config.theta1),
        get(run.config.theta2),
    )?;
    let c = linear_drift_census(&run.model, &spec, get(run.config.max_radius), &run.plan)?;
    let (lo, hi) = (get(run.config.fit_lo), get(run.config.fit_hi));
    let rate = c.approach_rate(lo, hi).ok();
    let approach = rate
        .as_ref()
        .map_or(String::new(), |f| f.slope.exp().to_string());
    let mut t = Table::new(&[
        "n",
        "total",
        "long_axis",
        "near_axis",
        "axis_barrier",
        "all",
        "fraction_all",
        "fitted_rate",
    ]);
    for n in 0..c.all.totals.len() {
        t.push([
            n.to_string(),
            c.all.totals[n].to_string(),
            c.long_axis.satisfied[n].to_string(),
            c.near_axis.satisfied[n].to_string(),
            c.axis_barrier.satisfied[n].to_string(),
            c.all.satisfied[n].to_string(),
            c.all.fractions[n].to_string(),
            approach.clone(),
        ]);
    }
    let summary = format!("all clauses at n = {hi}: {:.6}", c.all.fractions[hi]);
    let results = json!({
        "census": c,
        "approach_fit": rate,
        "approach_rate": rate.as_ref().map(|f| f.slope.exp()),
    });
    Ok(Artifacts::new(&results, summary)?.with_table(t))
}

fn audit_contraction(run: &Resolved) -> Run {
    let m = &run.model;
    let f = word(m, &run.config.f);
    let t = word(m, &run.config.t);
    let sample = get(run.config.sample_radius);
    let axis = AxisSet::new(m, &f, &t, get(run.config.axis_radius), &run.plan)?;
    let contraction = contraction_audit(m, &axis, sample, &run.plan)?;
    let bounded = bounded_intersection_audit(m, &f, sample, &run.plan)?;
    let summary = format!("C_emp = {}, B_emp = {}", contraction.c_emp, bounded.b_emp);
    Artifacts::new(
        &json!({ "contraction": contraction, "bounded_intersection": bounded }),
        summary,
    )
}

fn admissible(run: &Resolved) -> Run {
    let m = &run.model;
    let f = word(m, &run.config.f);
    let mut r = rng(run);
    let t1 = run
        .config
        .t1
        .as_ref()
        .map_or_else(|| m.random_element(4, &mut r), |_| word(m, &run.config.t1));
    let t2 = run
        .config
        .t2
        .as_ref()
        .map_or_else(|| m.random_element(4, &mut r), |_| word(m, &run.config.t2));
    let params = AdmissibleParams {
        d: get(run.config.d),
        tau: run.config.tau,
        window: get(run.config.window_radius),
    };
    let w = build_admissible_witness(m, &t1, &f, get(run.config.power), &t2, &params, &run.plan)?;
    let report = validate_admissible(m, &w, 0)?;
    let mut mutations = Vec::new();
    for mutation in Mutation::ALL {
        let outcome = match mutate_witness(m, &w, mutation) {
            Some(bad) => {
                let r = validate_admissible(m, &bad, 0)?;
                json!({ "mutation": format!("{mutation:?}"), "applicable": true, "rejected": !r.valid, "report": r })
            }
            None => json!({ "mutation": format!("{mutation:?}"), "applicable": false }),
        };
        mutations.push(outcome);
    }
    let fmt = |v: &[Element]| v.iter().map(|x| m.format(x)).collect::<Vec<_>>();
    let summary = format!(
        "g = {}: valid = {}, tau = {}, len(p0) + len(q0) = {}",
        m.format(&w.g),
        report.valid,
        report.tau_g,
        report.len_p0 + report.len_q0
    );
    let results = json!({
        "t1": m.format(&t1),
        "t2": m.format(&t2),
        "g": m.format(&w.g),
        "tau": w.tau,
        "d": w.d,
        "p0": fmt(w.p(0)),
        "q0": fmt(w.q(0)),
        "report": report,
        "mutations": mutations,
    });
    Artifacts::new(&results, summary)
}

fn complex_build(run: &Resolved) -> Run {
    let m = &run.model;
    let f = word(m, &run.config.f);
    let window = get(run.config.window_radius);
    let table = window_table(m, &f, window, &run.plan)?;
    let k = match run.config.k {
        Some(k) => k,
        None => smallest_connecting_k(m, &table, window, &run.plan)?,
    };
    let graph = complex_from_table(m, &table, k, window, &run.plan)?;
    let stability = window_stability(m, &f, k, window, &run.plan)?;
    let summary = format!(
        "K = {k}: {} vertices, {} edges, connected = {}, window-stable = {}",
        graph.vertices.len(),
        graph.edge_count(),
        graph.is_connected(),
        stability.stable
    );
    let results = json!({
        "k": k,
        "k_was_default": run.config.k.is_none(),
        "vertices": graph.vertices,
        "edge_count": graph.edge_count(),
        "connected": graph.is_connected(),
        "distances_consistent": graph.distances_consistent(),
        "window_stability": stability,
    });
    let mut t = Table::new(&["u", "v", "distance"]);
    for (i, row) in graph.distances.iter().enumerate() {
        for (j, d) in row.iter().enumerate().skip(i + 1) {
            t.push([
                i.to_string(),
                j.to_string(),
                d.map_or(String::new(), |d| d.to_string()),
            ]);
        }
    }
    Ok(Artifacts::new(&results, summary)?
        .with_table(t)
        .with_text(graph.to_adjacency_text()))
}

fn complex_loxodromic(run: &Resolved) -> Run {
    let m = &run.model;
    let r = loxodromic_test(
        m,
        &word(m, &run.config.f),
        &word(m, &run.config.g),
        get(run.config.k),
        get(run.config.k_prime),
        get(run.config.max_radius),
        get(run.config.window_radius),
        &run.plan,
    )?;
    let mut t = Table::new(&["N", "distance"]);
    for (n, d) in r.distances.iter().enumerate() {
        t.push([n.to_string(), d.map_or(String::new(), |d| d.to_string())]);
    }
    let summary = format!(
        "d_P(g^-N X, g^N X) = {:?}; evidence = {}",
        r.distances, r.loxodromic_evidence
    );
    Ok(Artifacts::new(&r, summary)?.with_table(t))
}

fn complex_acyl(run: &Resolved) -> Run {
    let m = &run.model;
    let f = word(m, &run.config.f);
    let window = get(run.config.window_radius);
    let k = match run.config.k {
        Some(k) => k,
        None => smallest_connecting_k(
            m,
            &window_table(m, &f, window, &run.plan)?,
            window,
            &run.plan,
        )?,
    };
    let acyl = acylindricity_probe(
        m,
        &f,
        k,
        window,
        get(run.config.d),
        run.config.r_values.as_deref().unwrap_or_default(),
        get(run.config.mover_radius),
        get(run.config.sample_size),
        &run.plan,
    )?;
    let mut r = rng(run);
    let samples: Vec<Element> = (0..get(run.config.samples))
        .map(|_| m.random_element(6, &mut r))
        .collect();
    let kernel = kernel_bound_probe(m, &samples, get(run.config.search_radius), &run.plan)?;
    let mut t = Table::new(&["R", "pairs", "max_movers"]);
    for row in &acyl.rows {
        t.push([row.r, row.pairs, row.max_movers]);
    }
    let summary = format!(
        "K = {k}; N(D, R) = {:?}; max |F| = {} over {} samples",
        acyl.rows.iter().map(|r| r.max_movers).collect::<Vec<_>>(),
        kernel.max_kernel,
        kernel.sampled
    );
    Ok(Artifacts::new(
        &json!({ "k": k, "acylindricity": acyl, "kernel_bound": kernel }),
        summary,
    )?
    .with_table(t))
}

fn series(run: &Resolved) -> Run {
    let kind: SeriesKind = run.config.kind.as_deref().unwrap_or_default().parse()?;
    let options = SeriesOptions {
        max_n: get(run.config.max_radius),
        max_order: get(run.config.max_order),
        delta_hat: run.config.delta_hat,
        window: (get(run.config.fit_lo), get(run.config.fit_hi)),
        annulus_width: run.config.annulus_width,
    };
    let r = series_report(&run.model, kind, &options, &run.plan)?;
    let mut header = vec!["n", "coefficient", "envelope"];
    if r.annulus_coefficients.is_some() {
        header.push("annulus");
    }
    let mut t = Table::new(&header);
    for (n, c) in r.coefficients.iter().enumerate() {
        let mut row = vec![
            n.to_string(),
            c.to_string(),
            r.envelope.values[n].to_string(),
        ];
        if let Some(a) = &r.annulus_coefficients {
            row.push(a.get(n).map_or(String::new(), ToString::to_string));
        }
        t.push(row);
    }
    let summary = format!("{kind}: {}", r.verdict);
    Ok(Artifacts::new(&r, summary)?.with_table(t))
}

fn scc(run: &Resolved) -> Run {
    let m = &run.model;
    let gens: Vec<Element> = run
        .config
        .generators
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|w| m.parse(w).expect("validated generator"))
        .collect();
    let r = scc_estimate(
        m,
        &gens,
        get(run.config.m1),
        get(run.config.m2),
        get(run.config.max_radius),
        &run.plan,
    )?;
    let mut t = Table::new(&["n", "orbit", "escaping"]);
    for (n, (a, b)) in r.orbit_spheres.iter().zip(&r.escaping_spheres).enumerate() {
        t.push([n as u64, *a, *b]);
    }
    let summary = format!(
        "delta(H) = {:.4}, delta(O) = {:.4}, gap = {:.4}",
        r.delta_orbit.delta_hat, r.delta_escaping.delta_hat, r.gap
    );
    Ok(Artifacts::new(&r, summary)?.with_table(t))
}
