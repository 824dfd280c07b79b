//! Unitary multidimensional DFT on the n^d lattice, backed by rustfft.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// In-place transform of a row-major `n^dim` array, scaled by `n^{-dim/2}`.
/// `direction` Forward uses the kernel `e^{-2πi k·m/n}`.
pub(crate) fn transform(data: &mut [Complex64], dim: usize, n: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = data.len();
    let mut lanes = vec![Complex64::new(0.0, 0.0); total];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        // Gather every lane along `axis` into contiguous storage.
        let block = stride * n;
        let mut lane = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let dst = &mut lanes[lane * n..(lane + 1) * n];
                for (r, d) in dst.iter_mut().enumerate() {
                    *d = data[base + r * stride];
                }
                lane += 1;
            }
        }
        fft.process_with_scratch(&mut lanes, &mut scratch);
        let mut lane = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                let src = &lanes[lane * n..(lane + 1) * n];
                for (r, s) in src.iter().enumerate() {
                    data[base + r * stride] = *s;
                }
                lane += 1;
            }
        }
    }
    let scale = (total as f64).sqrt().recip();
    for z in data.iter_mut() {
        *z *= scale;
    }
}
