//! Shared inputs for the benchmarks.

use snni_core::random::{random_verified_net, RandomNetParams};
use snni_core::{fixtures, VerifiedNet};

pub fn fixture(name: &str) -> VerifiedNet {
    let net = fixtures::by_name(name).expect("known fixture");
    VerifiedNet::new(net, snni_core::oracle::DEFAULT_CAP).expect("fixture satisfies the assumptions")
}

/// The first `count` random nets of the default generator.
pub fn battery(count: u64) -> Vec<VerifiedNet> {
    let params = RandomNetParams::default();
    (0..count).map(|seed| random_verified_net(seed, &params).0).collect()
}
