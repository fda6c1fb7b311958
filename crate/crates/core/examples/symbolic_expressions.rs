// Parse an expression over chart coordinates, differentiate it, print the
// normalized form and evaluate it at a point.

use projmob::symexpr::{evaluate, is_zero, parse_with_params, Constants};

fn main() {
    let coords = ["t", "x"];
    let e = parse_with_params("exp(2*t)*sin(x)^2 + C*x", &coords, &["C"]).unwrap();
    let dt = e.diff(0);
    let dx = e.diff(1);
    println!("f       = {e}");
    println!("df/dt   = {dt}");
    println!("df/dx   = {dx}");

    let mut constants = Constants::new();
    constants.insert("C".into(), 0.5);
    let v = evaluate(&e, &[0.1, 0.7], &constants).unwrap();
    println!("f(0.1, 0.7) = {v:.12}");

    // d/dt f − 2 exp(2t) sin²x vanishes identically.
    let rest = dt.sub(&parse_with_params("2*exp(2*t)*sin(x)^2", &coords, &[]).unwrap());
    let z = is_zero(&rest, &[(-1.0, 1.0), (0.1, 3.0)], &constants, 16, 0).unwrap();
    println!("identity holds: {}", z.is_zero());
    assert!(z.is_zero());

    // Printed forms parse back to the same expression.
    let back = parse_with_params(&dx.to_string(), &coords, &["C"]).unwrap();
    assert!(back.sub(&dx).is_zero());
}
