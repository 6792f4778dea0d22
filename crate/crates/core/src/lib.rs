pub mod audit;
pub mod corpus;
pub mod factored;
pub mod generators;
pub mod numeric;
pub mod primes;
pub mod selftest;
