#include "hjmm/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace hjmm::kernels {

const KernelSet* avx2_set_impl();  // defined in kernels_avx2.cpp (may return nullptr)

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelSet* pick_default() {
    if (const char* env = std::getenv("HJMM_KERNELS")) {
        const std::string want(env);
        for (const KernelSet* s : available_sets()) {
            if (want == s->name) return s;
        }
    }
    if (const KernelSet* avx2 = avx2_set_impl(); avx2 != nullptr && cpu_has_avx2()) {
        return avx2;
    }
    return &scalar_set();
}

std::atomic<const KernelSet*> g_active{nullptr};

}  // namespace

std::vector<const KernelSet*> available_sets() {
    std::vector<const KernelSet*> sets{&scalar_set()};
    if (const KernelSet* avx2 = avx2_set_impl(); avx2 != nullptr && cpu_has_avx2()) {
        sets.push_back(avx2);
    }
    return sets;
}

const KernelSet& active() {
    const KernelSet* set = g_active.load(std::memory_order_acquire);
    if (set == nullptr) {
        set = pick_default();
        g_active.store(set, std::memory_order_release);
    }
    return *set;
}

bool select(std::string_view name) {
    for (const KernelSet* s : available_sets()) {
        if (name == s->name) {
            g_active.store(s, std::memory_order_release);
            return true;
        }
    }
    return false;
}

}  // namespace hjmm::kernels
