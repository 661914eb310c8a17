// SPDX-License-Identifier: Apache-2.0
//
// Allocation accounting for solver workspaces.
//
// A solver installs an AllocationTracker for the calling thread with
// ScopedTracking. Every buffer obtained through TrackingAllocator on that
// thread while the scope is active is charged to the tracker. Memory held by
// third-party objects (Eigen decompositions) is charged explicitly with
// ExternalCharge.

#pragma once

#include <cstddef>
#include <memory>
#include <new>

namespace smomp {

class AllocationTracker {
public:
    void allocate(std::size_t bytes) noexcept
    {
        current_ += bytes;
        if (current_ > peak_)
            peak_ = current_;
    }
    void release(std::size_t bytes) noexcept { current_ = bytes > current_ ? 0 : current_ - bytes; }

    std::size_t current_bytes() const noexcept { return current_; }
    std::size_t peak_bytes() const noexcept { return peak_; }

    void reset() noexcept { current_ = peak_ = 0; }

private:
    std::size_t current_ = 0;
    std::size_t peak_ = 0;
};

namespace detail {
AllocationTracker*& active_tracker() noexcept;
}

// Installs `tracker` as the active tracker of this thread for the scope's lifetime.
class ScopedTracking {
public:
    explicit ScopedTracking(AllocationTracker& tracker) noexcept
        : previous_(detail::active_tracker())
    {
        detail::active_tracker() = &tracker;
    }
    ~ScopedTracking() { detail::active_tracker() = previous_; }

    ScopedTracking(const ScopedTracking&) = delete;
    ScopedTracking& operator=(const ScopedTracking&) = delete;

private:
    AllocationTracker* previous_;
};

// Charges `bytes` to the active tracker (if any) for the guard's lifetime.
class ExternalCharge {
public:
    explicit ExternalCharge(std::size_t bytes) noexcept
        : tracker_(detail::active_tracker()), bytes_(bytes)
    {
        if (tracker_)
            tracker_->allocate(bytes_);
    }
    ~ExternalCharge()
    {
        if (tracker_)
            tracker_->release(bytes_);
    }

    ExternalCharge(const ExternalCharge&) = delete;
    ExternalCharge& operator=(const ExternalCharge&) = delete;

private:
    AllocationTracker* tracker_;
    std::size_t bytes_;
};

// std::allocator that reports to the tracker active at allocation time.
// The tracker pointer is captured per allocator instance so a buffer is
// always released against the tracker that paid for it.
template <class T>
class TrackingAllocator {
public:
    using value_type = T;

    TrackingAllocator() noexcept : tracker_(detail::active_tracker()) {}
    template <class U>
    TrackingAllocator(const TrackingAllocator<U>& other) noexcept : tracker_(other.tracker()) {}

    T* allocate(std::size_t n)
    {
        T* p = std::allocator<T>{}.allocate(n);
        if (tracker_)
            tracker_->allocate(n * sizeof(T));
        return p;
    }
    void deallocate(T* p, std::size_t n) noexcept
    {
        if (tracker_)
            tracker_->release(n * sizeof(T));
        std::allocator<T>{}.deallocate(p, n);
    }

    AllocationTracker* tracker() const noexcept { return tracker_; }

    // Copies made for a new container pick up the tracker of the copying thread.
    TrackingAllocator select_on_container_copy_construction() const noexcept { return TrackingAllocator{}; }

    using propagate_on_container_copy_assignment = std::false_type;
    using propagate_on_container_move_assignment = std::true_type;
    using propagate_on_container_swap = std::true_type;
    using is_always_equal = std::true_type;

    template <class U>
    bool operator==(const TrackingAllocator<U>&) const noexcept { return true; }

private:
    AllocationTracker* tracker_;
};

} // namespace smomp
