use std::fmt::Write as _;

use rand::Rng as _;

use crate::rng::{rng, Rng};

fn normal(r: &mut Rng) -> f64 {
    let u1: f64 = 1.0 - r.random::<f64>();
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn pick<'a>(r: &mut Rng, items: &[(&'a str, f64)]) -> &'a str {
    let mut u: f64 = r.random();
    for (s, p) in items {
        if u < *p {
            return s;
        }
        u -= p;
    }
    items[items.len() - 1].0
}

/// Synthetic records in the stroke-prediction layout (header included).
///
/// Marginals loosely follow the public dataset: about 5% positives driven
/// mostly by age, glucose, hypertension and heart disease; about 4% of bmi
/// cells are `N/A`; a few bmi values fall outside `[12.7, 45]`. Meant for
/// demos and tests, not for drawing conclusions.
pub fn synthetic_stroke_csv(n: usize, seed: u64) -> String {
    let mut r = rng(seed);
    let mut out = String::from(
        "id,gender,age,hypertension,heart_disease,ever_married,work_type,Residence_type,avg_glucose_level,bmi,smoking_status,stroke\n",
    );
    for i in 0..n {
        let gender = pick(&mut r, &[("Female", 0.585), ("Male", 0.4148), ("Other", 0.0002)]);
        let age: f64 = if r.random_bool(0.1) {
            (r.random_range(0.08..16.0) * 100.0_f64).round() / 100.0
        } else {
            r.random_range(16.0..82.0_f64).round()
        };
        let old = (age - 45.0) / 20.0;
        let hypertension = r.random_bool((0.1 + 0.08 * old).clamp(0.005, 0.6));
        let heart = r.random_bool((0.05 + 0.05 * old).clamp(0.002, 0.4));
        let married = if age < 18.0 {
            "No"
        } else if r.random_bool(0.8) {
            "Yes"
        } else {
            "No"
        };
        let work = if age < 16.0 {
            pick(&mut r, &[("children", 0.97), ("Never_worked", 0.03)])
        } else {
            pick(
                &mut r,
                &[
                    ("Private", 0.64),
                    ("Self-employed", 0.18),
                    ("Govt_job", 0.16),
                    ("Never_worked", 0.02),
                ],
            )
        };
        let residence = if r.random_bool(0.5) { "Urban" } else { "Rural" };
        let glucose = if r.random_bool(0.15) {
            180.0 + 40.0 * normal(&mut r).abs()
        } else {
            (4.55 + 0.2 * normal(&mut r)).exp()
        };
        let glucose = (glucose.clamp(55.0, 272.0) * 100.0).round() / 100.0;
        let bmi = if r.random_bool(0.04) {
            None
        } else if r.random_bool(0.02) {
            Some(r.random_range(45.5..80.0_f64))
        } else {
            Some((28.0 + 6.5 * normal(&mut r)).clamp(13.0, 45.0))
        };
        let smoking = if age < 16.0 {
            "Unknown"
        } else {
            pick(
                &mut r,
                &[
                    ("never smoked", 0.37),
                    ("Unknown", 0.3),
                    ("formerly smoked", 0.17),
                    ("smokes", 0.16),
                ],
            )
        };
        let z = -5.2
            + 2.0 * old
            + 0.6 * f64::from(u8::from(hypertension))
            + 0.6 * f64::from(u8::from(heart))
            + 0.006 * (glucose - 100.0);
        let stroke = r.random_bool(1.0 / (1.0 + (-z).exp()));
        let bmi = bmi.map_or("N/A".to_owned(), |b| format!("{:.1}", b));
        let _ = writeln!(
            out,
            "{},{gender},{age},{},{},{married},{work},{residence},{glucose},{bmi},{smoking},{}",
            10_000 + i,
            u8::from(hypertension),
            u8::from(heart),
            u8::from(stroke)
        );
    }
    out
}
