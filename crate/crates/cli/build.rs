fn main() {
    // LAPACK and BLAS symbols come from the system OpenBLAS.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
