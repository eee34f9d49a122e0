// Copyright 2026 su3kit Contributors
// SPDX-License-Identifier: Apache-2.0

//! Internal SU(2) Clebsch-Gordan coefficients (Racah's closed form).
//!
//! Only used to factor isoscalar parts out of the SU(3) coefficients in
//! verification code; not part of the public API.

/// log(k!) table, grown on demand would be nicer but labels here are tiny.
fn ln_factorial(k: i64) -> f64 {
    debug_assert!(k >= 0);
    let mut acc = 0.0f64;
    for i in 2..=k {
        acc += (i as f64).ln();
    }
    acc
}

fn triangle_ok(two_j1: i64, two_j2: i64, two_j3: i64) -> bool {
    two_j3 >= (two_j1 - two_j2).abs()
        && two_j3 <= two_j1 + two_j2
        && (two_j1 + two_j2 + two_j3) % 2 == 0
}

/// `⟨j₁ m₁ j₂ m₂ | j m⟩` with all spins and projections doubled.
pub fn clebsch_gordan(
    two_j1: i64,
    two_m1: i64,
    two_j2: i64,
    two_m2: i64,
    two_j: i64,
    two_m: i64,
) -> f64 {
    if two_m1 + two_m2 != two_m
        || !triangle_ok(two_j1, two_j2, two_j)
        || two_m1.abs() > two_j1
        || two_m2.abs() > two_j2
        || two_m.abs() > two_j
        || (two_j1 + two_m1) % 2 != 0
        || (two_j2 + two_m2) % 2 != 0
        || (two_j + two_m) % 2 != 0
    {
        return 0.0;
    }

    // Racah's formula; everything in doubled units must be halved inside.
    let h = |x: i64| -> i64 {
        debug_assert!(x % 2 == 0);
        x / 2
    };
    let j1pj2mj = h(two_j1 + two_j2 - two_j);
    let j1mj2pj = h(two_j1 - two_j2 + two_j);
    let mj1pj2pj = h(-two_j1 + two_j2 + two_j);
    let jtot1 = h(two_j1 + two_j2 + two_j) + 1;

    let ln_pref = ((two_j + 1) as f64).ln()
        + ln_factorial(j1pj2mj)
        + ln_factorial(j1mj2pj)
        + ln_factorial(mj1pj2pj)
        - ln_factorial(jtot1)
        + ln_factorial(h(two_j + two_m))
        + ln_factorial(h(two_j - two_m))
        + ln_factorial(h(two_j1 - two_m1))
        + ln_factorial(h(two_j1 + two_m1))
        + ln_factorial(h(two_j2 - two_m2))
        + ln_factorial(h(two_j2 + two_m2));

    let k_min = 0
        .max(h(two_j2 - two_j - two_m1))
        .max(h(two_j1 + two_m2 - two_j));
    let k_max = j1pj2mj
        .min(h(two_j1 - two_m1))
        .min(h(two_j2 + two_m2));

    let mut sum = 0.0f64;
    for k in k_min..=k_max {
        let ln_den = ln_factorial(k)
            + ln_factorial(j1pj2mj - k)
            + ln_factorial(h(two_j1 - two_m1) - k)
            + ln_factorial(h(two_j2 + two_m2) - k)
            + ln_factorial(h(two_j - two_j2 + two_m1) + k)
            + ln_factorial(h(two_j - two_j1 - two_m2) + k);
        let term = (0.5 * ln_pref - ln_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    sum
}
