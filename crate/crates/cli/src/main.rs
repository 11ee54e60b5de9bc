fn main() {
    println!("stereo-unsup");
}
