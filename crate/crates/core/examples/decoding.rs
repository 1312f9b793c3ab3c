//! Draws an RID design, simulates answers for a hidden defective set and
//! decodes them by elimination.

use grouptest::bitmat::{or_columns, DefectiveSet};
use grouptest::decode::{decode_eliminate, good_row_count, is_disjunct, is_separable};
use grouptest::designs::{upper_bound_m, DesignSpec, Model};

fn main() -> grouptest::Result<()> {
    let (n, d) = (60, 2);
    let sized = upper_bound_m(Model::Rid, n, d, 0.1)?;
    let spec = DesignSpec::new(n, sized.m, sized.param)?;
    let m = spec.generate_seeded(2024)?;
    println!(
        "RID design: {} tests, {} items, {}",
        m.rows(),
        m.cols(),
        sized.param
    );

    for labels in [vec![7, 41], vec![3], vec![12, 13]] {
        let hidden = DefectiveSet::from_labels(&labels, d)?;
        let answers = or_columns(&m, &hidden)?;
        let found: Vec<usize> = decode_eliminate(&m, &answers)?
            .iter()
            .map(|i| i + 1)
            .collect();
        println!(
            "defective {:?}: {} positive tests, {} good rows, decoded {:?}, disjunct {}, separable {}",
            hidden.labels(),
            answers.positives(),
            good_row_count(&m, &hidden)?,
            found,
            is_disjunct(&m, &hidden)?,
            is_separable(&m, &hidden, d)?,
        );
    }
    Ok(())
}
