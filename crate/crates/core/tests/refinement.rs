use rayon::prelude::*;
use spinsurf::ambient::{load_preset, preset_names};
use spinsurf::chart::Grid;
use spinsurf::reconstruction::{extract_shape_operator, ExtractOptions};
use spinsurf::transport::{transport_solve, Branch, SpecialKillingData};

const SIZES: [usize; 3] = [32, 64, 128];

/// Killing residual, holonomy defect and sup error of extracted `A`.
fn errors(name: &str, n: usize) -> [f64; 3] {
    let s = load_preset(name).unwrap();
    let truth = s.shape_field();
    let grid = Grid::new(s.patch.domain, n, n).unwrap();
    let data = SpecialKillingData::for_surface(&s, Branch::First).unwrap();
    let t = transport_solve(&data, &grid).unwrap();
    let trace =
        extract_shape_operator(&t.field, &s.frame, &s.context, Branch::First, &ExtractOptions::default()).unwrap();
    let a = grid
        .nodes()
        .map(|(i, j)| {
            let (u, v) = grid.coords(i, j);
            (trace.shape.values[grid.index(i, j)] - truth.at(u, v)).abs().max()
        })
        .fold(0.0, f64::max);
    [t.killing_residual, t.holonomy_defect, a]
}

#[test]
fn transport_and_extraction_refine_at_high_order() {
    let names: Vec<&str> = preset_names().into_iter().filter(|n| *n != "flat-plane-R3").collect();
    let rows: Vec<(&str, Vec<[f64; 3]>)> = names
        .par_iter()
        .map(|&name| (name, SIZES.iter().map(|&n| errors(name, n)).collect()))
        .collect();
    for (name, e) in rows {
        for w in e.windows(2) {
            let order = |k: usize| (w[0][k] / w[1][k]).log2();
            assert!(order(0) >= 3.5, "{name} killing order {}", order(0));
            assert!(order(1) >= 3.5, "{name} holonomy order {}", order(1));
            assert!(order(2) >= 3.0, "{name} extraction order {}", order(2));
        }
    }
}

#[test]
fn flat_plane_is_exact_at_every_size() {
    for n in SIZES {
        assert_eq!(errors("flat-plane-R3", n), [0.0; 3]);
    }
}
