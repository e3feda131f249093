//! Runs selected acceptance criteria and prints their JSON reports: `cargo run --example acceptance_report -- 2 6`.

fn main() {
    let ids: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids = if ids.is_empty() { vec![1, 2] } else { ids };
    for id in ids {
        let r = moire_wells::verify::run_criterion(id);
        println!("{}", r.line());
        println!("{}", serde_json::to_string_pretty(&r.measured).unwrap_or_default());
    }
}
