//! Published figures from the full dblp and IMDB histories.
//!
//! These need the external datasets and cannot be recomputed here; they are
//! kept for documentation and for comparing shapes of locally produced
//! reports. Nothing in the pipeline depends on them.

use crate::annotation::KindCounts;

/// Corrections found by two-observation extraction on dblp, by pair of
/// observation years (state at the beginning of each year).
pub const DBLP_EMBEDDED: [((u16, u16), KindCounts); 3] = [
    ((2013, 2017), KindCounts { merge: 19_175, split: 2_207, distribute: 5_346 }),
    ((2015, 2017), KindCounts { merge: 13_393, split: 1_536, distribute: 3_968 }),
    ((2017, 2018), KindCounts { merge: 8_608, split: 978, distribute: 2_666 }),
];

/// Published totals of the rows above.
pub const DBLP_EMBEDDED_TOTALS: [usize; 3] = [26_728, 18_897, 12_252];

/// Size of the dblp case-based collection.
pub const DBLP_CASES: KindCounts = KindCounts { merge: 138_532, split: 16_532, distribute: 55_362 };

/// Blocking hit rates in percent on merge+distribute name pairs, in
/// [`crate::BlockingVariant::ALL`] column order.
pub const DBLP_BLOCKING: [f64; 4] = [76.51, 78.56, 77.10, 79.10];
pub const IMDB_BLOCKING: [f64; 4] = [46.24, 56.64, 47.15, 57.57];
