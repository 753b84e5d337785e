use super::Report;
use crate::eval::Model;
use crate::memstruct::MemStructure;
use crate::modelgen::{enumerate_range, shard_ranges};
use rayon::prelude::*;
use std::ops::RangeInclusive;

/// A check that runs structure by structure.
pub trait StructureCheck: Sync {
    fn name(&self) -> String;

    /// Structures outside the check's scope are skipped and not counted.
    fn applies(&self, _s: &MemStructure) -> bool {
        true
    }

    /// Examines one structure, adding counts (but not the structure count)
    /// and any failure to `report`.
    fn check(&self, s: &MemStructure, model: &Model, structure_id: &str, report: &mut Report);
}

fn run_one(checks: &[&dyn StructureCheck], s: &MemStructure, id: &str, reports: &mut [Report]) {
    let model = Model::new(s).expect("small structures fit the model");
    for (c, r) in checks.iter().zip(reports.iter_mut()) {
        if c.applies(s) {
            r.structures += 1;
            c.check(s, &model, id, r);
        }
    }
}

fn fresh_reports(checks: &[&dyn StructureCheck]) -> Vec<Report> {
    checks.iter().map(|c| Report::new(c.name())).collect()
}

fn merge_all(mut acc: Vec<Report>, parts: Vec<Vec<Report>>) -> Vec<Report> {
    for part in parts {
        for (a, p) in acc.iter_mut().zip(part) {
            a.merge(p);
        }
    }
    acc
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool")
}

/// Runs every check over all structures with node counts in `sizes`.
/// Structure ids are `n:mask`. Results do not depend on `jobs`.
pub fn run_exhaustive(sizes: RangeInclusive<usize>, checks: &[&dyn StructureCheck], jobs: usize) -> Vec<Report> {
    let mut shards = Vec::new();
    for n in sizes {
        for r in shard_ranges(n, 64) {
            shards.push((n, r));
        }
    }
    let parts: Vec<Vec<Report>> = pool(jobs).install(|| {
        shards
            .par_iter()
            .map(|(n, range)| {
                let mut reports = fresh_reports(checks);
                for (mask, s) in enumerate_range(*n, range.clone(), false).expect("size in range") {
                    run_one(checks, &s, &format!("{n}:{mask}"), &mut reports);
                }
                reports
            })
            .collect()
    });
    merge_all(fresh_reports(checks), parts)
}

/// Runs every check over the given structures; ids are list positions.
pub fn run_on(structures: &[MemStructure], checks: &[&dyn StructureCheck], jobs: usize) -> Vec<Report> {
    let parts: Vec<Vec<Report>> = pool(jobs).install(|| {
        structures
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let mut reports = fresh_reports(checks);
                run_one(checks, s, &format!("#{i}"), &mut reports);
                reports
            })
            .collect()
    });
    merge_all(fresh_reports(checks), parts)
}
