//! Split a walk into its sign stream and axis urn, then put it back together.
//!
//! cargo run --release --example urn_decomposition

use erwhex::lattice::Axis;
use erwhex::urn::{
    decompose_trajectory, mean_replacement_matrix, recompose, reconstruct_position,
    urn_transition_probs,
};
use erwhex::walk::simulate_history;
use erwhex::{CountVector3, WalkParams};

fn main() -> erwhex::Result<()> {
    let walk = simulate_history(&WalkParams::new(0.6, 30, 5)?)?;
    let (signs, axes, times) = decompose_trajectory(&walk);

    let line = |f: &dyn Fn(usize) -> String| (0..walk.len()).map(f).collect::<Vec<_>>().join("");
    println!(
        "directions {}",
        line(&|i| walk.steps()[i].index().to_string())
    );
    println!(
        "signs      {}",
        line(&|i| if signs.0[i].value() > 0 {
            "+".into()
        } else {
            "-".into()
        })
    );
    println!("axes       {}", line(&|i| axes.0[i].exponent().to_string()));
    for axis in Axis::ALL {
        println!("tau^{}: {:?}", axis.exponent(), times.for_axis(axis));
    }

    assert_eq!(recompose(&signs, &axes), walk);
    let rebuilt = reconstruct_position(&signs, &times);
    println!(
        "endpoint {:?}, rebuilt from signs and stopping times {:?}",
        walk.final_position(),
        rebuilt
    );

    let c = times.counts();
    println!(
        "urn counts {:?}, next-axis law {:?}",
        c.as_array(),
        urn_transition_probs(&c, 0.6)?
    );
    println!(
        "empty-ish urn {:?}",
        urn_transition_probs(&CountVector3::new([1, 0, 0]), 0.6)?
    );
    let m = mean_replacement_matrix(0.6)?;
    println!("mean replacement matrix {:?}", m.0);
    println!(
        "row sums {:?}, column sums {:?}",
        m.row_sums(),
        m.column_sums()
    );
    Ok(())
}
