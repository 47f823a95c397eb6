use hs_core::convergence::Reference;
use hs_core::evolution::solve;
use hs_core::exact;
use hs_core::lagrangian::to_lagrangian_grid;
use hs_core::projection::project;
use hs_core::pwl;

fn main() {
    let data = exact::ex42_data();
    let alpha = hs_core::AlphaFunction::Ex42;
    let t_end = 3.0;
    let reference = exact::ex42_reference(t_end).unwrap();
    let rref = Reference::Numeric(&reference);

    let dx = 0.25f64.powi(4);
    let proj = project(&data, dx).unwrap();
    let grid = to_lagrangian_grid(&proj);
    let traj = solve(&grid, &alpha, t_end, dx).unwrap();

    let t = 2.2072538860103625;
    let a = rref.snapshot(t).unwrap();
    let b = traj.eulerian_at(t).unwrap();
    // Locate the sup of |u_ref − u_num|.
    let mut worst = (0.0f64, 0.0f64);
    for x in pwl::merged_breakpoints(&a.u, &b.u) {
        let d = (a.u.eval(x) - b.u.eval(x)).abs();
        if d > worst.1 { worst = (x, d); }
    }
    println!("sup at x = {:.8}, |du| = {:.6e}", worst.0, worst.1);
    for dxp in [-0.03f64, -0.02, -0.01, -0.005, 0.0, 0.005, 0.01, 0.02, 0.03] {
        let x = worst.0 + dxp;
        println!("x = {x:.5}: u_ref = {:.8}, u_num = {:.8}, F_ref = {:.8}, F_num = {:.8}",
            a.u.eval(x), b.u.eval(x), a.f.eval(x), b.f.eval(x));
    }
    // Energy curves near the spike.
    for tt in [2.20, 2.2072538860103625, 2.21, 20.0/9.0, 2.23] {
        println!("t = {tt:.6}: Vinf_ref = {:.8}, Vinf_num = {:.8}",
            reference.v_inf_at(tt), traj.v_inf_at(tt));
    }
}
