use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn run(code: &std::ffi::CStr) {
    Python::attach(|py| {
        let m = PyModule::new(py, "laug").unwrap();
        laug_py::laug_module(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("laug", m).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn text_helpers() {
    run(c"
assert abs(laug.fuzzy_ratio('lester', 'leicester') - 0.8) < 1e-12
assert laug.number_to_spoken('13:45') == 'thirteen forty five'
assert laug.detect_value('leaving from lester', 'leicester', 0.7)[:2] == (13, 19)
assert laug.serialize_da([('train', 'inform', 'dest', 'Cambridge')], ['train']) == 'train * { inform ( dest = Cambridge ) }'
r = laug.overall_f1([[]], [[]])
assert r['f1'] == 1.0
");
}

#[test]
fn augmenter_round_trip() {
    run(c"
import json
a = laug.Augmenter(seed=7)
assert a.seed == 7
fixture = laug.fixture_json()
recs = a.augment(fixture, 'sd', 'test')
assert recs == laug.Augmenter(seed=7).augment(fixture, 'sd', 'test')
assert laug.change_rates(fixture, recs)['slot_rate'] == 0.0
out = a.augment_text('I want to go to Cambridge.', [('attraction', 'inform', 'dest', 'Cambridge')], 'sd')
assert out['da'] == [('attraction', 'inform', 'dest', 'Cambridge')]
s = out['spans'][0]
assert out['text'][s[1]:s[2]] == 'Cambridge'
scores = a.baseline(fixture)
assert all(scores[m] < scores['Ori.'] for m in ('WP', 'TP', 'SR', 'SD'))
try:
    laug.Augmenter(config_json=json.dumps({**json.loads(a.config_json()), 'ratio': 0}))
    raise AssertionError('bad ratio accepted')
except ValueError as e:
    assert 'ratio' in str(e)
");
}
