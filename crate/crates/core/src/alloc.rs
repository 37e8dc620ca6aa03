//! Output buffer allocation for kernels.

/// Buffers at least this large are advised to use transparent huge pages.
const HUGE_PAGE_THRESHOLD: usize = 4 << 20;

/// Empty vector with room for `len` elements.
///
/// On Linux, large buffers are marked with `MADV_HUGEPAGE` before first
/// touch, which cuts page-fault overhead when filling fresh memory.
pub(crate) fn output_buffer<T>(len: usize) -> Vec<T> {
    let v = Vec::with_capacity(len);
    #[cfg(target_os = "linux")]
    advise_huge_pages(&v);
    v
}

#[cfg(target_os = "linux")]
fn advise_huge_pages<T>(v: &Vec<T>) {
    const PAGE: usize = 4096;
    let bytes = v.capacity() * std::mem::size_of::<T>();
    if bytes < HUGE_PAGE_THRESHOLD {
        return;
    }
    let begin = v.as_ptr() as usize;
    let start = (begin + PAGE - 1) & !(PAGE - 1);
    let end = (begin + bytes) & !(PAGE - 1);
    if end > start {
        // SAFETY: the range lies inside the vector's own allocation and the
        // advice does not alter its contents or mapping permissions.
        unsafe {
            libc::madvise(start as *mut libc::c_void, end - start, libc::MADV_HUGEPAGE);
        }
    }
}
