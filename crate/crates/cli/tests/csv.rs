use std::io::Write;

use colsel::DenseMatrix;
use colsel_cli::{parse_matrix_csv, parse_matrix_str, CliError};

fn line_of(err: CliError) -> u64 {
    match err {
        CliError::Format { line, .. } => line,
        other => panic!("expected a format error, got {other}"),
    }
}

#[test]
fn identity() {
    let m = parse_matrix_str("1,0\n0,1\n", "t").unwrap();
    assert_eq!(m, DenseMatrix::identity(2));
}

#[test]
fn ragged_row_reports_its_line() {
    let err = parse_matrix_str("1,0\n0\n", "t").unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert_eq!(line_of(err), 2);
}

#[test]
fn exponents_and_signs() {
    let m = parse_matrix_str("1e-3,2.5\n-1,0\n", "t").unwrap();
    assert_eq!(m, DenseMatrix::from_rows(&[vec![0.001, 2.5], vec![-1.0, 0.0]]).unwrap());
}

#[test]
fn whitespace_and_blank_lines() {
    let m = parse_matrix_str(" 1 , 2\n\n3,4 \n", "t").unwrap();
    assert_eq!(m.rows(), 2);
    assert_eq!(m[(1, 0)], 3.0);
}

#[test]
fn rejects_non_numbers() {
    for text in ["1,x\n", "1,NaN\n", "inf,1\n", "1,,2\n", "1,2\n-infinity,0\n"] {
        assert!(matches!(parse_matrix_str(text, "t"), Err(CliError::Format { .. })), "{text:?}");
    }
    assert_eq!(line_of(parse_matrix_str("1,2\n-infinity,0\n", "t").unwrap_err()), 2);
}

#[test]
fn rejects_empty_input() {
    assert!(matches!(parse_matrix_str("", "t"), Err(CliError::Format { .. })));
}

#[test]
fn reads_files() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "0.5,1\n2,3\n").unwrap();
    let m = parse_matrix_csv(f.path()).unwrap();
    assert_eq!(m.data(), &[0.5, 1.0, 2.0, 3.0]);

    let missing = f.path().with_extension("missing");
    assert!(matches!(parse_matrix_csv(&missing), Err(CliError::Io { .. })));
}
