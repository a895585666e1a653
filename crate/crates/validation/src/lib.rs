//! Holds the `acceptance` test target. It lives in its own package so the
//! unit and integration suites of the other crates run before it.
