use triplehyp::harness::{run_suite, Summary, SuiteFilter};
use triplehyp::SeriesControl;

#[test]
fn desk_suite_passes() {
    let reports = run_suite(&SuiteFilter::default(), &SeriesControl::default()).unwrap();
    for r in &reports {
        println!("{r} {}", r.diagnostics);
    }
    let s = Summary::of(&reports);
    assert!(s.all_passed(), "{s:?}");
}
