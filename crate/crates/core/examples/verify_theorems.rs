//! Cross-check every bundled fixture: episodes against answer sets, Q values
//! against direct estimates, and the naive solver against the SAT route.

use bq::check::{check_theory, CheckConfig};
use bq::fixtures;
use bq::q::Mode;

fn main() {
    for (name, source) in fixtures::ALL {
        let theory = fixtures::load(source).unwrap();
        for mode in [Mode::QLearning, Mode::Sarsa] {
            let config = CheckConfig { mode, ..CheckConfig::default() };
            let report = check_theory(&theory, &config).unwrap();
            println!("== {name} ({mode})");
            print!("{}", report.to_text());
        }
    }
}
