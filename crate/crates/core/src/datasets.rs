//! Bundled example data.

use crate::error::Result;
use crate::table::ContingencyTable;
use crate::tensor::DenseTensor;

pub const HEALTH_AGE_GROUPS: [&str; 7] = ["16-24", "25-34", "35-44", "45-54", "55-64", "65-74", "75+"];
pub const HEALTH_GRADES: [&str; 5] = ["Very good", "Good", "Regular", "Bad", "Very bad"];
pub const HEALTH_GENDERS: [&str; 2] = ["M", "F"];

// rows: age group, columns: health grade
const MALES: [[u32; 5]; 7] = [
    [145, 402, 84, 5, 3],
    [112, 414, 74, 13, 2],
    [80, 331, 82, 24, 4],
    [54, 231, 102, 22, 6],
    [30, 219, 119, 53, 12],
    [18, 125, 110, 35, 4],
    [9, 67, 65, 25, 8],
];
const FEMALES: [[u32; 5]; 7] = [
    [98, 387, 83, 13, 3],
    [108, 395, 90, 22, 4],
    [67, 327, 99, 17, 4],
    [36, 238, 134, 28, 10],
    [23, 195, 187, 53, 18],
    [26, 142, 174, 63, 16],
    [11, 69, 92, 41, 9],
];

/// Self-assessed health by gender, age group and grade (Spanish National
/// Health Survey, 1997), as a 2×7×5 table.
pub fn health_survey() -> Result<ContingencyTable> {
    let counts = DenseTensor::from_fn(vec![2, 7, 5], |ix| {
        let src = if ix[0] == 1 { &MALES } else { &FEMALES };
        f64::from(src[ix[1] - 1][ix[2] - 1])
    })?;
    let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    ContingencyTable::new(
        counts,
        vec!["gender".into(), "age".into(), "health".into()],
        vec![
            owned(&HEALTH_GENDERS),
            owned(&HEALTH_AGE_GROUPS),
            owned(&HEALTH_GRADES),
        ],
    )
}
