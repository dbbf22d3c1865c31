//! Runs the ten acceptance criteria and prints one line each.
//! `XIDEFORM_ACCEPT=1,4,8` restricts the run to the listed criteria.

fn main() {
    let ids: Vec<u8> = std::env::var("XIDEFORM_ACCEPT")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect())
        .unwrap_or_default();
    let results = xideform_cli::acceptance::run(&ids, &mut |r| println!("{}", r.line()));
    let failed: Vec<u8> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!(
        "acceptance: {} passed, {} failed {:?}",
        results.len() - failed.len(),
        failed.len(),
        failed
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
