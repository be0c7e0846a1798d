#include <cstdio>

int main() {
  std::puts("potpoly: no subcommand (placeholder build)");
  return 64;
}
