//! Counter-based generator: every lattice site owns an independent SplitMix64
//! stream keyed by `(seed, sample, i, j)`, so a site's weight is a pure
//! function of its coordinates.

use rand::RngCore;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SiteRng {
    key: u64,
    counter: u64,
}

impl SiteRng {
    pub fn new(seed: u64, sample: u64, i: u64, j: u64) -> Self {
        let mut k = mix(seed.wrapping_add(GOLDEN));
        k = mix(k ^ sample.wrapping_mul(GOLDEN));
        k = mix(k ^ i.wrapping_mul(0xd1b5_4a32_d192_ed03));
        k = mix(k ^ j.wrapping_mul(0x8cb9_2ba7_2f3d_8dd7));
        Self { key: k, counter: 0 }
    }
}

impl RngCore for SiteRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(GOLDEN);
        mix(self.key.wrapping_add(self.counter))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}
