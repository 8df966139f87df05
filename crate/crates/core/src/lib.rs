pub mod cache;
pub mod clan;
pub mod epsmap;
pub mod kflag;
pub mod klengine;
pub mod klvengine;
pub mod lie;
pub mod linalg;
pub mod lorbits;
pub mod perm;
pub mod poly;
pub mod porbit;
pub mod rootdata;
pub mod verify;
