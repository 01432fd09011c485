use num_complex::Complex;

fn main() {
    type T = f64;
    let a = Complex::new(1.0f64, 0.0);
    let x = 2.5f64;
    let one = Complex::new(1.0f64, 0.0);
    let floor: T = 1e-280;
    let guard = |w: Complex<T>| {
        if w.norm() < floor { Complex::new(floor, 0.0) } else { w }
    };
    let mut b = Complex::new(x + 1.0, 0.0) - a;
    let mut c = one / Complex::new(floor, 0.0);
    let mut d = one / guard(b);
    let mut h = d;
    for i in 1..12u32 {
        let an = Complex::new(i as f64, 0.0) * (a - i as f64);
        b = b + 2.0;
        d = one / guard(an * d + b);
        c = guard(b + an / c);
        let del = d * c;
        h = h * del;
        println!("i={i} an={an} del={del} |del-1|={:.3e} h={h}", (del - one).norm());
        if (del - one).norm() < 4.44e-16 {
            println!("converged, value = {}", x.powf(1.0) * (-x).exp() * h);
            return;
        }
    }
    println!("stalled");
}
