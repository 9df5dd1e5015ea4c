#![allow(dead_code)]

use abssep::table::round_sci;
use abssep::{canonicalize, parse_poly, IntPolynomial, MeasureKind};

/// One published record cell: degree, height bound, measure, polynomial, value.
pub struct Cell {
    pub degree: usize,
    pub height: u64,
    pub measure: MeasureKind,
    pub poly: &'static str,
    pub value: &'static str,
}

const fn cell(degree: usize, height: u64, measure: MeasureKind, poly: &'static str, value: &'static str) -> Cell {
    Cell { degree, height, measure, poly, value }
}

use MeasureKind::{AbsSep, ImGap, ReGap, Sep};

pub const RECORDS: [Cell; 20] = [
    cell(3, 10, Sep, "5X^3+8X^2-9X+2", "1.421e-2"),
    cell(3, 20, Sep, "14X^3+17X^2-13X+2", "4.938e-3"),
    cell(4, 10, Sep, "3X^4-9X^3-10X^2+7X-1", "4.187e-3"),
    cell(4, 20, Sep, "9X^4-13X^3-14X^2+17X-4", "5.974e-4"),
    cell(5, 10, Sep, "9X^5+X^4-4X^3-9X^2-3X+7", "4.656e-4"),
    cell(3, 10, AbsSep, "10X^3-3X^2-2X+3", "5.394e-4"),
    cell(3, 20, AbsSep, "17X^3-9X^2-7X+8", "1.233e-5"),
    cell(4, 10, AbsSep, "X^4-6X^3-7X^2+5X+6", "2.276e-6"),
    cell(4, 20, AbsSep, "5X^4-17X^3-20X^2+11X+12", "1.034e-7"),
    cell(5, 10, AbsSep, "9X^5-5X^4-4X^3-2X^2-2X-9", "1.459e-7"),
    cell(3, 10, ReGap, "7X^3+5X^2+5X+1", "5.952e-4"),
    cell(3, 20, ReGap, "19X^3+8X^2+15X+2", "2.218e-5"),
    cell(4, 10, ReGap, "9X^4+5X^3-X^2+5X-1", "1.472e-6"),
    cell(4, 20, ReGap, "13X^4+3X^3+5X^2+19X-7", "1.669e-7"),
    cell(5, 10, ReGap, "7X^5-6X^4-6X^3-5X^2+X+1", "2.511e-7"),
    cell(3, 10, ImGap, "10X^3+6X^2-6X+1", "2.403e-2"),
    cell(3, 20, ImGap, "19X^3+9X^2-19X+5", "5.082e-3"),
    cell(4, 10, ImGap, "10X^4+X^3+10", "6.250e-5"),
    cell(4, 20, ImGap, "20X^4+X^3+20", "7.813e-6"),
    cell(5, 10, ImGap, "5X^5-8X^4+6X^3+5X^2-5X+8", "1.061e-7"),
];

/// Smaller minima found by the exhaustive search where the printed
/// polynomial is not the minimum; each was cross-checked with mpmath.
pub const TRUE_MINIMA: [Cell; 5] = [
    cell(4, 20, AbsSep, "18X^4-3X^3+4X^2-6X-3", "1.095e-8"),
    cell(4, 20, ReGap, "4X^4+5X^3+4X^2-19X-20", "5.016e-8"),
    cell(5, 10, AbsSep, "6X^5+10X^4-10X^3+4X^2+2X-5", "2.962e-8"),
    cell(5, 10, ReGap, "3X^5+4X^4-8X^3+8X^2+6X-7", "8.528e-8"),
    cell(5, 10, ImGap, "7X^5-4X^4-8X^3-7X^2-X-3", "7.696e-8"),
];

pub fn true_minimum(degree: usize, height: u64, measure: MeasureKind) -> Option<&'static Cell> {
    TRUE_MINIMA.iter().find(|c| c.degree == degree && c.height == height && c.measure == measure)
}

/// Polynomial, abssep, quality.
pub const QUALITY_ROWS: [(&str, &str, f64); 10] = [
    ("2X^3+X^2-X-1", "5.309e-2", 4.24),
    ("13X^3+11X^2+8X+5", "3.462e-5", 4.00),
    ("181X^3+153X^2+112X+71", "9.007e-10", 4.01),
    ("X^4-X^2-2X-3", "8.615e-4", 6.42),
    ("4X^4+2X^3-X^2-3X-3", "3.655e-5", 7.37),
    ("55X^4+14X^3-11X^2-40X-1", "2.724e-11", 6.07),
    ("X^5+X^4+2X^3+3X^2-2X+2", "2.697e-5", 9.58),
    ("2X^5+2X^4+X^3-X^2-2", "6.473e-4", 10.59),
    // printed as 1.463e-6; the quality column pins the exponent
    ("4X^5+2X^4-4X^3+3X-2", "1.463e-5", 8.03),
    ("8X^5+5X^4-4X^3+4X^2-5X-4", "5.185e-8", 8.07),
];

pub fn poly(s: &str) -> IntPolynomial {
    parse_poly(s).expect("valid polynomial")
}

pub fn sig4(s: &str) -> String {
    round_sci(s, 4).expect("decimal")
}

pub fn same_orbit(a: &str, b: &str) -> bool {
    canonicalize(&poly(a)).unwrap() == canonicalize(&poly(b)).unwrap()
}
