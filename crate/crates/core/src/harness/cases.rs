use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: &'static str,
    pub task_names: &'static [&'static str],
}

const CASES: [TestCase; 15] = [
    TestCase { id: "TC_4_1", task_names: &["kroA100", "kroA150", "kroA200", "kroC100"] },
    TestCase { id: "TC_4_2", task_names: &["kroB100", "kroB150", "kroD100", "kroE100"] },
    TestCase { id: "TC_4_3", task_names: &["kroA100", "kroA150", "kroD100", "kroE100"] },
    TestCase { id: "TC_4_4", task_names: &["kroA200", "kroC100", "kroB100", "kroB150"] },
    TestCase { id: "TC_4_5", task_names: &["kroA100", "kroA200", "kroB100", "kroD100"] },
    TestCase { id: "TC_4_6", task_names: &["kroA150", "kroC100", "kroB150", "kroE100"] },
    TestCase { id: "TC_4_7", task_names: &["kroA100", "kroA150", "kroB100", "kroB150"] },
    TestCase { id: "TC_4_8", task_names: &["kroA200", "kroC100", "kroD100", "kroE100"] },
    TestCase { id: "TC_4_9", task_names: &["kroA100", "kroC100", "kroB100", "kroD100"] },
    TestCase { id: "TC_4_10", task_names: &["kroA150", "kroA200", "kroB150", "kroE100"] },
    TestCase {
        id: "TC_6_1",
        task_names: &["kroA100", "kroA150", "kroA200", "kroB100", "kroC100", "kroB150"],
    },
    TestCase {
        id: "TC_6_2",
        task_names: &["kroA200", "kroB100", "kroC100", "kroB150", "kroD100", "kroE100"],
    },
    TestCase {
        id: "TC_6_3",
        task_names: &["kroA100", "kroA150", "kroA200", "kroB150", "kroD100", "kroE100"],
    },
    TestCase {
        id: "TC_6_4",
        task_names: &["kroA100", "kroA150", "kroB100", "kroC100", "kroD100", "kroE100"],
    },
    TestCase {
        id: "TC_8",
        task_names: &[
            "kroA100", "kroA150", "kroA200", "kroB100", "kroC100", "kroB150", "kroD100",
            "kroE100",
        ],
    },
];

pub fn builtin_test_cases() -> Vec<TestCase> {
    CASES.to_vec()
}

pub fn find_test_case(id: &str) -> Result<TestCase> {
    CASES
        .iter()
        .find(|c| c.id.eq_ignore_ascii_case(id))
        .cloned()
        .ok_or_else(|| Error::UnknownTestCase(id.to_string()))
}

/// Optimal tour lengths published with TSPLIB.
pub const KNOWN_OPTIMA: [(&str, u64); 8] = [
    ("kroA100", 21282),
    ("kroB100", 22141),
    ("kroC100", 20749),
    ("kroD100", 21294),
    ("kroE100", 22068),
    ("kroA150", 26524),
    ("kroB150", 26130),
    ("kroA200", 29368),
];

pub fn known_optimum(instance: &str) -> Option<u64> {
    KNOWN_OPTIMA
        .iter()
        .find(|(n, _)| *n == instance)
        .map(|&(_, v)| v)
}
