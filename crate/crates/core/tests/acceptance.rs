//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! followed by every quantity it compared.

use qquery::verify::criterion;

fn check(id: u8) {
    let c = criterion(id);
    println!("{c}");
    for d in &c.details {
        println!("    {d}");
    }
    assert!(c.passed, "{c}\n{}", c.details.join("\n"));
}

macro_rules! criteria {
    ($($name:ident => $id:expr),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                check($id);
            }
        )*
    };
}

criteria! {
    c01_or_theta_zero => 1,
    c02_or_optimum => 2,
    c03_single_final_measurement => 3,
    c04_andor2_theta_zero_table => 4,
    c05_andor2_optimum_table => 5,
    c06_state_checkpoints => 6,
    c07_gram_geometry => 7,
    c08_one_sided_bound => 8,
    c09_classical_baselines => 9,
    c10_verdicts => 10,
    c11_restriction_de_morgan => 11,
    c12_las_vegas_parity => 12,
    c13_exact_vs_sampled => 13,
    c14_genetic_search => 14,
}
