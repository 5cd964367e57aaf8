int g;
int out;

void *setter(void *arg) {
  g = 2;
  return 0;
}

int main() {
  pthread_t t;
  pthread_create(&t, 0, setter, 0);
  if (g > 1)
    out = 1;
  else
    out = 2;
  pthread_join(t, 0);
  return out;
}
