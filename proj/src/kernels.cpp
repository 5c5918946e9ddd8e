#include "pcgcn/kernels.hpp"

#include <cstdio>
#include <cstdlib>

namespace pcgcn::kernels {
namespace {

const KernelTable* pick_default() {
    return avx2_supported() ? &avx2_table() : &scalar_table();
}

const KernelTable* lookup(std::string_view name) {
    if (name == "scalar") return &scalar_table();
    if (name == "avx2" && avx2_supported()) return &avx2_table();
    return nullptr;
}

const KernelTable* initial() {
    if (const char* env = std::getenv("PCGCN_KERNELS")) {
        if (const KernelTable* t = lookup(env)) return t;
        std::fprintf(stderr, "warning: PCGCN_KERNELS='%s' unknown or unsupported, using default\n", env);
    }
    return pick_default();
}

const KernelTable*& active_slot() {
    static const KernelTable* slot = initial();
    return slot;
}

} // namespace

const KernelTable& active() { return *active_slot(); }

bool select(std::string_view name) {
    if (const KernelTable* t = lookup(name)) {
        active_slot() = t;
        return true;
    }
    return false;
}

std::vector<std::string> available() {
    std::vector<std::string> out{"scalar"};
    if (avx2_supported()) out.push_back("avx2");
    return out;
}

} // namespace pcgcn::kernels
