use erm_lab::classes::convex_lip::CvxOracle;
use erm_lab::core::*;
use std::time::Instant;

fn main() {
    for n in [64usize, 512, 1024, 4096] {
        let s = DesignSample::draw(DistributionId::Uniform { d: 1 }, n, 9).unwrap();
        let f0 = MemberFn::Quadratic { a: 1.0, b: 0.5, c: -0.1 };
        let f0v = f0.eval_on(&s);
        let y = NoiseVector::standard(n, 3).targets(&f0v);
        let o = CvxOracle::new(&s);
        let t0 = Instant::now();
        let (v, _, gap, conv) = o.erm_qp(&y, 1e-9).unwrap();
        let err: f64 = v.as_slice().iter().zip(f0v.as_slice()).map(|(a,b)| (a-b)*(a-b)).sum::<f64>() / n as f64;
        println!("n={n}: err={err:.4e} gap={gap:.3e} conv={conv} t={:?}", t0.elapsed());
    }
}
