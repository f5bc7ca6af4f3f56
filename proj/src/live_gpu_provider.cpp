#include <dlfcn.h>

#include "lcbench/telemetry.hpp"

namespace lcbench {
namespace {

// Subset of the NVML C API, resolved at runtime so the harness builds and
// runs on hosts without the NVIDIA driver.
using nvmlReturn_t = int;
using nvmlDevice_t = void*;
constexpr nvmlReturn_t kNvmlSuccess = 0;

struct NvmlMemory {
  unsigned long long total;
  unsigned long long free;
  unsigned long long used;
};

using InitFn = nvmlReturn_t (*)();
using ShutdownFn = nvmlReturn_t (*)();
using HandleFn = nvmlReturn_t (*)(unsigned, nvmlDevice_t*);
using PowerFn = nvmlReturn_t (*)(nvmlDevice_t, unsigned*);
using MemoryFn = nvmlReturn_t (*)(nvmlDevice_t, NvmlMemory*);
using NameFn = nvmlReturn_t (*)(nvmlDevice_t, char*, unsigned);

template <typename Fn>
Fn Resolve(void* lib, const char* name) {
  auto* sym = dlsym(lib, name);
  if (!sym) throw ProviderError(std::string("NVML symbol missing: ") + name);
  return reinterpret_cast<Fn>(sym);
}

}  // namespace

struct LiveGpuProvider::Impl {
  void* lib = nullptr;
  nvmlDevice_t device = nullptr;
  unsigned index = 0;
  std::string name;
  double total_gb = 0.0;
  ShutdownFn shutdown = nullptr;
  PowerFn power = nullptr;
  MemoryFn memory = nullptr;
};

LiveGpuProvider::LiveGpuProvider(unsigned device_index) : impl_(std::make_unique<Impl>()) {
  impl_->index = device_index;
  impl_->lib = dlopen("libnvidia-ml.so.1", RTLD_NOW | RTLD_LOCAL);
  if (!impl_->lib) throw ProviderError("NVML unavailable: libnvidia-ml.so.1 not found");
  try {
    auto init = Resolve<InitFn>(impl_->lib, "nvmlInit_v2");
    impl_->shutdown = Resolve<ShutdownFn>(impl_->lib, "nvmlShutdown");
    auto handle = Resolve<HandleFn>(impl_->lib, "nvmlDeviceGetHandleByIndex_v2");
    impl_->power = Resolve<PowerFn>(impl_->lib, "nvmlDeviceGetPowerUsage");
    impl_->memory = Resolve<MemoryFn>(impl_->lib, "nvmlDeviceGetMemoryInfo");
    auto name = Resolve<NameFn>(impl_->lib, "nvmlDeviceGetName");
    if (init() != kNvmlSuccess) throw ProviderError("nvmlInit failed");
    if (handle(device_index, &impl_->device) != kNvmlSuccess) {
      impl_->shutdown();
      throw ProviderError("no GPU at index " + std::to_string(device_index));
    }
    char buf[96] = {};
    if (name(impl_->device, buf, sizeof(buf)) == kNvmlSuccess) impl_->name = buf;
    NvmlMemory mem{};
    if (impl_->memory(impl_->device, &mem) == kNvmlSuccess) {
      impl_->total_gb = static_cast<double>(mem.total) / kBytesPerGb;
    }
  } catch (...) {
    dlclose(impl_->lib);
    throw;
  }
}

LiveGpuProvider::~LiveGpuProvider() {
  if (impl_ && impl_->lib) {
    impl_->shutdown();
    dlclose(impl_->lib);
  }
}

std::string LiveGpuProvider::device() const {
  return "gpu" + std::to_string(impl_->index) + (impl_->name.empty() ? "" : " (" + impl_->name + ")");
}

ProviderCapabilities LiveGpuProvider::capabilities() const {
  // NVML refreshes board power roughly every 20 ms.
  return {20, impl_->total_gb, true};
}

double LiveGpuProvider::poll(Millis) {
  unsigned milliwatts = 0;
  if (impl_->power(impl_->device, &milliwatts) != kNvmlSuccess) throw ProviderError("nvmlDeviceGetPowerUsage failed");
  return milliwatts / 1000.0;
}

std::optional<double> LiveGpuProvider::poll_memory_gb(Millis) {
  NvmlMemory mem{};
  if (impl_->memory(impl_->device, &mem) != kNvmlSuccess) throw ProviderError("nvmlDeviceGetMemoryInfo failed");
  return static_cast<double>(mem.used) / kBytesPerGb;
}

}  // namespace lcbench
