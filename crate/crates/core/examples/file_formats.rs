//! Writes and reads the plain-text matrix and answer formats.

use grouptest::bitmat::{self, AnswerVector, BitMatrix, Matrix, QaryMatrix};

fn main() -> grouptest::Result<()> {
    let dir = std::env::temp_dir().join("grouptest-formats");
    std::fs::create_dir_all(&dir).map_err(|source| grouptest::Error::Io {
        path: dir.clone(),
        source,
    })?;

    let id = Matrix::Binary(BitMatrix::identity(3)?);
    let path = dir.join("identity.txt");
    bitmat::write_matrix(&path, &id)?;
    print!("{}", bitmat::render_matrix(&id));
    assert_eq!(bitmat::read_matrix(&path)?, id);

    // a q-ary row expands into q binary rows, one per symbol
    let mq = QaryMatrix::from_rows(3, &[vec![1, 2, 3, 1], vec![2, 2, 1, 3]])?;
    let qpath = dir.join("transversal.txt");
    bitmat::write_matrix(&qpath, &Matrix::Qary(mq.clone()))?;
    print!("\n{}", bitmat::render_matrix(&Matrix::Qary(mq.clone())));
    println!("expands to");
    print!("{}", bitmat::render_matrix(&Matrix::Binary(mq.expand())));

    let answers = AnswerVector::new(vec![true, false, true]);
    let apath = dir.join("answers.txt");
    bitmat::write_answers(&apath, &answers)?;
    assert_eq!(bitmat::read_answers(&apath, Some(3))?, answers);

    match bitmat::parse_matrix("2 3\n101\n10\n", "broken.txt") {
        Err(e) => println!("\nmalformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
