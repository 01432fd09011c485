use periodlab::archimedean::{
    assert_closed_form_calibration, i_k_closed, i_k_quadrature, local_whittaker_discrete_check,
};
use periodlab::quad::QuadratureConfig;
use periodlab::real::Real;

fn main() {
    let cfg = QuadratureConfig::for_bits(<f64 as Real>::BITS);
    assert_closed_form_calibration::<f64>(&cfg).expect("calibration");
    let closed = i_k_closed::<f64>(2, 1.0, -1.0, 0.6).unwrap();
    let quad = i_k_quadrature::<f64>(2, 1.0, -1.0, 0.6, &cfg).unwrap();
    let rel = (closed - quad).norm() / closed.norm();
    println!("i_2(1,-1,0.6) closed {closed:.12e}, quadrature rel diff {rel:.2e}");
    assert!(rel < 1e-8);
    let report = local_whittaker_discrete_check(6, 6, -1.0_f64, 1e-8).unwrap();
    println!("vanishing branch abs err {:.2e} pass={}", report.abs_err, report.pass);
    assert!(report.pass);
    println!("drive ok");
}
