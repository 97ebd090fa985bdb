//! Acceptance gate: every criterion runs at its stated tolerance and prints
//! one pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).

use boussinesq_ist::asymptotics::evaluate_grid;
use boussinesq_ist::report::Report;
use boussinesq_ist::spectral::SpectralData;
use boussinesq_ist::suites;

const SEED: u64 = 7;

fn gate(n: usize, name: &str, rep: &Report, all_ok: &mut bool) {
    let pass = rep.all_pass();
    println!("criterion {n} ({name}): {}", if pass { "PASS" } else { "FAIL" });
    for f in rep.failures() {
        println!(
            "    FAIL {} residual {:.4e} tol {:.1e}",
            f.check, f.residual, f.tol
        );
    }
    *all_ok &= pass;
}

#[test]
fn acceptance_criteria() {
    let sd = SpectralData::synthetic(SEED);
    let mut ok = true;

    gate(1, "saddle closed form", &suites::saddle_suite(), &mut ok);
    gate(2, "modulus identities", &suites::modulus_suite(&sd), &mut ok);
    gate(3, "delta jump relations", &suites::delta_jump_suite(&sd), &mut ok);
    gate(
        4,
        "dual-representation oracle",
        &suites::dual_representation_suite(&sd),
        &mut ok,
    );
    gate(5, "jump algebra", &suites::jump_algebra_suite(&sd), &mut ok);
    gate(6, "scattering", &suites::scattering_suite(), &mut ok);
    gate(7, "model RH problems", &suites::model_rhp_suite(&sd), &mut ok);
    gate(
        8,
        "theorem structure",
        &suites::theorem_structure_suite(&sd),
        &mut ok,
    );

    // criterion 9: determinism and format
    let mut rep = suites::format_suite(&sd);
    let zetas = [0.3, 0.4];
    let ts = [16.0, 64.0];
    let a = evaluate_grid(&zetas, &ts, &sd);
    let b = evaluate_grid(&zetas, &ts, &sd);
    let ser_a = serde_json::to_string(&a.rows).unwrap();
    let ser_b = serde_json::to_string(&b.rows).unwrap();
    rep.push(boussinesq_ist::report::CheckRecord::new(
        "grid_rerun_byte_identical",
        None,
        if ser_a == ser_b && a.defects.is_empty() {
            0.0
        } else {
            1.0
        },
        0.0,
    ));
    gate(9, "determinism and format", &rep, &mut ok);

    assert!(ok, "one or more acceptance criteria failed (see lines above)");
}
