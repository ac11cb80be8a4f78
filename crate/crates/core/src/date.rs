//! Observation dates at day granularity.

use core::fmt;
use core::str::FromStr;

use crate::error::Error;

/// A calendar day, printed and parsed as `YYYY-MM-DD`.
///
/// Field order makes the derived ordering chronological, which is also the
/// lexicographic order of the ISO rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: u16,
    month: u8,
    day: u8,
}

impl Date {
    pub fn new(year: u16, month: u8, day: u8) -> Result<Self, Error> {
        if year > 9999 || !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return Err(Error::InvalidDate(alloc::format!("{year:04}-{month:02}-{day:02}")));
        }
        Ok(Date { year, month, day })
    }

    pub fn year(self) -> u16 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    pub fn day(self) -> u8 {
        self.day
    }

    /// The following calendar day.
    pub fn succ(self) -> Date {
        if self.day < days_in_month(self.year, self.month) {
            Date { day: self.day + 1, ..self }
        } else if self.month < 12 {
            Date { month: self.month + 1, day: 1, ..self }
        } else {
            Date { year: self.year + 1, month: 1, day: 1 }
        }
    }

    /// `n` consecutive days starting at `self`.
    pub fn daily(self, n: usize) -> alloc::vec::Vec<Date> {
        let mut out = alloc::vec::Vec::with_capacity(n);
        let mut d = self;
        for _ in 0..n {
            out.push(d);
            d = d.succ();
        }
        out
    }
}

fn is_leap(year: u16) -> bool {
    (year.is_multiple_of(4) && !year.is_multiple_of(100)) || year.is_multiple_of(400)
}

fn days_in_month(year: u16, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

impl FromStr for Date {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidDate(s.into());
        let b = s.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return Err(bad());
        }
        let num = |r: core::ops::Range<usize>| -> Result<u16, Error> {
            let part = &s[r];
            if !part.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            part.parse().map_err(|_| bad())
        };
        let year = num(0..4)?;
        let month = num(5..7)? as u8;
        let day = num(8..10)? as u8;
        Date::new(year, month, day).map_err(|_| bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parse_and_print() {
        let d: Date = "2017-01-01".parse().unwrap();
        assert_eq!(d.to_string(), "2017-01-01");
        assert!("2017-02-29".parse::<Date>().is_err());
        assert!("2016-02-29".parse::<Date>().is_ok());
        assert!("2017-1-01".parse::<Date>().is_err());
        assert!("+017-01-01".parse::<Date>().is_err());
    }

    #[test]
    fn successor_rolls_over() {
        let d: Date = "2016-12-31".parse().unwrap();
        assert_eq!(d.succ().to_string(), "2017-01-01");
        let d: Date = "2016-02-28".parse().unwrap();
        assert_eq!(d.succ().to_string(), "2016-02-29");
    }

    #[test]
    fn order_matches_string_order() {
        let a: Date = "2013-01-01".parse().unwrap();
        let b: Date = "2017-01-01".parse().unwrap();
        assert!(a < b);
        assert!(a.to_string() < b.to_string());
    }
}
