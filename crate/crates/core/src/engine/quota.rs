use num_rational::BigRational;

use super::CountError;
use crate::value::{self, Value};

/// Droop quota, always a whole number of votes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quota(Value);

impl Quota {
    pub fn value(&self) -> &Value {
        &self.0
    }

    pub(crate) fn from_value(v: BigRational) -> Self {
        Quota(v)
    }
}

/// `floor(total / (vacancies + 1)) + 1`: the smallest whole number such
/// that `vacancies + 1` candidates cannot all reach it.
pub fn compute_quota(total_formal_votes: u64, vacancies: usize) -> Result<Quota, CountError> {
    if total_formal_votes == 0 {
        return Err(CountError::NoFormalVotes);
    }
    if vacancies == 0 {
        return Err(CountError::NoVacancies);
    }
    let q = total_formal_votes / (vacancies as u64 + 1) + 1;
    Ok(Quota(value::from_int(q)))
}
