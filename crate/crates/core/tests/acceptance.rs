//! One line per acceptance criterion; exits nonzero if any criterion fails. Runs without the
//! libtest harness so the table is printed on every run.

use nalgebra::Matrix2;
use polylip::reproduce::{example_lcp_matrix, golden, run, CRITERIA};

/// Smallest singular value of the LCP matrix from a general symmetric eigensolver, as an
/// independent check on the closed form used by criterion 3.
fn sigma_min_from_nalgebra() -> f64 {
    let m = example_lcp_matrix();
    let m = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
    let eig = (m * m.transpose()).symmetric_eigen();
    eig.eigenvalues.min().sqrt()
}

fn main() {
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let r = run(id);
        println!("[{}] criterion {:>2} {:<40} {:>7.2}s  {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.seconds, r.detail);
        if !r.passed {
            failed.push(id);
        }
    }
    let via_eigen = 1.0 / sigma_min_from_nalgebra();
    let eigen_ok = (via_eigen - golden()).abs() <= 1e-12;
    println!("[{}] criterion  3 cross-check with a symmetric eigensolver: {via_eigen:.15}", if eigen_ok { "PASS" } else { "FAIL" });
    if !eigen_ok {
        failed.push(3);
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
