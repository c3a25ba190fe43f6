//! Incremental discounted sums and recovering the value at any step.

use bq::q::{q_reconstruct, tail, OnlineQ};

fn main() {
    let rewards = [1.0, -1.0, -1.0, 10.0];
    let gamma = 0.9;

    let mut online = OnlineQ::with_horizon(gamma, rewards.len());
    for r in rewards {
        let v = online.push(r).unwrap();
        println!("after {} steps: {v:.6}", online.steps());
    }
    println!("a fifth reward is rejected: {}", online.push(0.0).unwrap_err());

    let q0 = online.value();
    for t in 0..rewards.len() {
        let back = q_reconstruct(q0, &rewards, gamma, t).unwrap();
        println!("t={t}: reconstructed {back:.9}, direct {:.9}", tail(&rewards, gamma, t));
    }
}
