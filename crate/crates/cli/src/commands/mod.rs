pub mod dichotomic;
pub mod discrepancy;
pub mod ppca;
pub mod relbo;
pub mod sweep_gm;
pub mod verify;

/// Every check name accepted in the `tolerances` section of a config file.
pub fn known_checks() -> Vec<&'static str> {
    let mut names: Vec<&str> = verify::CHECKS.iter().map(|(n, _)| *n).collect();
    for n in [
        ppca::CHECK,
        relbo::IDENTITY_CHECK,
        relbo::EVIDENCE_CHECK,
        sweep_gm::CHECK,
    ] {
        if !names.contains(&n) {
            names.push(n);
        }
    }
    names
}
