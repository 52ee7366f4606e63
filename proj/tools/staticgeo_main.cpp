#include <cstdio>

int main() {
  std::puts("staticgeo: not yet wired up");
  return 2;
}
